"""Wire-protocol conformance checks, runnable against any live endpoint that
claims to implement the completion/embedding protocol.

Every check raises ContractViolation with a precise message on failure, so
the same suite doubles as a debugging aid when pointing at a new provider.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx

from .lexicon import LexigenError
from .providers import COMPLETE_PATH, EMBED_PATH, _auth_headers
from .textmetrics import cosine

SELF_COSINE_TOL = 1e-6


class ContractViolation(LexigenError):
    pass


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ContractViolation(message)


def _post(client: httpx.Client, base_url: str, path: str, payload: dict, api_key=None):
    return client.post(base_url.rstrip("/") + path, json=payload, headers=_auth_headers(api_key))


def run_embed_checks(
    base_url: str,
    api_key: str | None = None,
    expect_dim: int | None = None,
    timeout_s: float = 120.0,
) -> int:
    """Check /v1/embed: response shape, advertised dim, determinism, order
    preservation, self-cosine, and rejection of empty input. Returns the dim."""
    with httpx.Client(timeout=timeout_s) as client:
        response = _post(client, base_url, EMBED_PATH, {"texts": ["hola", "hola"]}, api_key)
        _require(response.status_code == 200, f"embed returned {response.status_code}")
        body = response.json()
        _require("vectors" in body and "dim" in body, "embed response missing vectors/dim")
        vectors, dim = body["vectors"], body["dim"]
        _require(len(vectors) == 2, f"sent 2 texts, got {len(vectors)} vectors")
        _require(
            all(len(vec) == dim for vec in vectors),
            "vector length does not match advertised dim",
        )
        _require(vectors[0] == vectors[1], "identical texts must embed identically")
        if expect_dim is not None:
            _require(dim == expect_dim, f"expected dim {expect_dim}, got {dim}")
        _require(
            abs(cosine(vectors[0], vectors[0]) - 1.0) <= SELF_COSINE_TOL,
            "self-cosine deviates from 1",
        )

        again = _post(client, base_url, EMBED_PATH, {"texts": ["hola"]}, api_key).json()
        _require(
            again["vectors"][0] == vectors[0],
            "same text embedded differently across requests",
        )

        pair = _post(client, base_url, EMBED_PATH, {"texts": ["uno", "dos"]}, api_key).json()
        swapped = _post(client, base_url, EMBED_PATH, {"texts": ["dos", "uno"]}, api_key).json()
        _require(
            pair["vectors"][0] == swapped["vectors"][1]
            and pair["vectors"][1] == swapped["vectors"][0],
            "embed does not preserve input order",
        )

        empty = _post(client, base_url, EMBED_PATH, {"texts": []}, api_key)
        _require(
            400 <= empty.status_code < 500,
            f"empty texts should be a 4xx, got {empty.status_code}",
        )
        _require("error" in empty.json(), "error responses must carry an 'error' field")
    return int(dim)


def run_complete_checks(
    base_url: str,
    api_key: str | None = None,
    timeout_s: float = 120.0,
) -> str:
    """Check /v1/complete. Returns "ok" for a conforming 200 response or
    "unconfigured" when the endpoint reports 501 (no upstream)."""
    payload = {"prompt": 'Define "casa".', "max_tokens": 64, "temperature": 0.5}
    with httpx.Client(timeout=timeout_s) as client:
        response = _post(client, base_url, COMPLETE_PATH, payload, api_key)
        if response.status_code == 501:
            _require("error" in response.json(), "501 must carry an 'error' field")
            return "unconfigured"
        _require(response.status_code == 200, f"complete returned {response.status_code}")
        body = response.json()
        for key in ("text", "tokens_prompt", "tokens_completion"):
            _require(key in body, f"complete response missing {key!r}")
        _require(isinstance(body["text"], str) and body["text"] != "", "empty completion text")
        _require(
            int(body["tokens_prompt"]) > 0 and int(body["tokens_completion"]) > 0,
            "token counts must be nonzero",
        )
    return "ok"


def run_healthz_check(base_url: str, timeout_s: float = 30.0) -> int:
    with httpx.Client(timeout=timeout_s) as client:
        response = client.get(base_url.rstrip("/") + "/healthz")
        _require(response.status_code == 200, f"healthz returned {response.status_code}")
        body = response.json()
        _require("dim" in body, "healthz must report the embedding dim")
    return int(body["dim"])


@dataclass(frozen=True)
class ContractReport:
    dim: int
    complete_status: str


def run_all_checks(
    base_url: str,
    api_key: str | None = None,
    expect_dim: int | None = None,
    check_healthz: bool = True,
) -> ContractReport:
    dim = run_embed_checks(base_url, api_key, expect_dim)
    if check_healthz:
        health_dim = run_healthz_check(base_url)
        _require(health_dim == dim, f"healthz dim {health_dim} != embed dim {dim}")
    status = run_complete_checks(base_url, api_key)
    return ContractReport(dim=dim, complete_status=status)
