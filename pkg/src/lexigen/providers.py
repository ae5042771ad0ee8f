"""Completion and embedding providers: wire-protocol HTTP clients, fully
deterministic mocks, and the shared rate-limit/retry machinery.

Both live providers speak the same JSON protocol:

    POST {endpoint}/v1/complete  {prompt, max_tokens, temperature}
        -> 200 {text, tokens_prompt, tokens_completion} | 4xx/5xx {error}
    POST {endpoint}/v1/embed     {texts: [...]}
        -> 200 {vectors: [[...]], dim} | 4xx/5xx {error}

The credential, when present, is sent as "Authorization: Bearer <key>"
(taken from the LEXIGEN_API_KEY environment variable by the CLI).
"""

from __future__ import annotations

import hashlib
import math
import random
import re
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence, TypeVar

import httpx

from .lexicon import LexigenError
from .textmetrics import tokenize

API_KEY_ENV = "LEXIGEN_API_KEY"
COMPLETE_PATH = "/v1/complete"
EMBED_PATH = "/v1/embed"

EmbeddingVector = tuple[float, ...]


class ProviderError(LexigenError):
    """Terminal provider failure (bad request, credential, protocol drift)."""


class TransientProviderError(ProviderError):
    """Retryable failure: timeouts, connection errors, 429 and 5xx statuses."""


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    max_tokens: int
    temperature: float = 0.5

    def __post_init__(self):
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    tokens_prompt: int
    tokens_completion: int

    def __post_init__(self):
        if self.tokens_prompt < 0 or self.tokens_completion < 0:
            raise ValueError("token counts must be >= 0")


class CompletionProvider(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionResult: ...


class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...


# --- rate limiting and retry -------------------------------------------------

@dataclass(frozen=True)
class RetryPolicy:
    rpm: int = 60
    max_retries: int = 3
    base_backoff_ms: float = 250.0

    def __post_init__(self):
        if self.rpm < 1:
            raise ValueError("rpm must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


class RateLimiter:
    """Sliding-window limiter: at most ``rpm`` acquisitions in any 60 s
    window. Clock and sleep are injectable so tests can run on a fake clock.
    Safe to share across worker threads."""

    WINDOW_S = 60.0

    def __init__(
        self,
        rpm: int,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rpm < 1:
            raise ValueError("rpm must be >= 1")
        self.rpm = rpm
        self._clock = clock
        self._sleep = sleep
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._stamps and self._stamps[0] <= now - self.WINDOW_S:
                    self._stamps.popleft()
                if len(self._stamps) < self.rpm:
                    self._stamps.append(now)
                    return
                wait = self._stamps[0] + self.WINDOW_S - now
            self._sleep(max(wait, 0.0))


T = TypeVar("T")


def with_rate_limit_and_retry(
    op: Callable[..., T],
    policy: RetryPolicy,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
) -> Callable[..., T]:
    """Wrap ``op`` so calls respect the rpm limit and transient failures are
    retried with jittered exponential backoff (max_retries + 1 attempts)."""
    limiter = RateLimiter(policy.rpm, clock=clock, sleep=sleep)
    rng = rng or random.Random()

    def wrapped(*args, **kwargs) -> T:
        last_error: TransientProviderError | None = None
        for attempt in range(policy.max_retries + 1):
            limiter.acquire()
            try:
                return op(*args, **kwargs)
            except TransientProviderError as exc:
                last_error = exc
                if attempt < policy.max_retries:
                    backoff = policy.base_backoff_ms / 1000.0 * (2**attempt)
                    sleep(backoff * (1.0 + rng.random()))
        assert last_error is not None
        raise last_error

    return wrapped


# --- live HTTP providers ------------------------------------------------------

def _auth_headers(api_key: str | None) -> dict[str, str]:
    return {"Authorization": f"Bearer {api_key}"} if api_key else {}


def _post_protocol(
    client: httpx.Client, url: str, payload: dict, api_key: str | None
) -> dict:
    try:
        response = client.post(url, json=payload, headers=_auth_headers(api_key))
    except httpx.TimeoutException as exc:
        raise TransientProviderError(f"timeout calling {url}: {exc}") from exc
    except httpx.HTTPError as exc:
        raise TransientProviderError(f"transport error calling {url}: {exc}") from exc
    if response.status_code == 200:
        return response.json()
    try:
        detail = response.json().get("error", response.text)
    except ValueError:
        detail = response.text
    message = f"{url} returned {response.status_code}: {detail}"
    if response.status_code == 429 or response.status_code >= 500:
        raise TransientProviderError(message)
    raise ProviderError(message)


class HttpCompletionProvider:
    """Text-completion client for the wire protocol, with rate limiting and
    retry applied around each request."""

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        policy: RetryPolicy = RetryPolicy(),
        timeout_s: float = 60.0,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self._client = httpx.Client(timeout=timeout_s)
        self._call = with_rate_limit_and_retry(self._post, policy)

    def _post(self, request: CompletionRequest) -> CompletionResult:
        obj = _post_protocol(
            self._client,
            self.endpoint + COMPLETE_PATH,
            {
                "prompt": request.prompt,
                "max_tokens": request.max_tokens,
                "temperature": request.temperature,
            },
            self.api_key,
        )
        try:
            return CompletionResult(
                text=str(obj["text"]),
                tokens_prompt=int(obj["tokens_prompt"]),
                tokens_completion=int(obj["tokens_completion"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed completion response: {exc}") from exc

    def complete(self, request: CompletionRequest) -> CompletionResult:
        return self._call(request)

    def close(self) -> None:
        self._client.close()


class HttpEmbeddingProvider:
    """Sentence-embedding client for the wire protocol. The vector dimension
    is pinned on first use; any later drift is a hard error."""

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        policy: RetryPolicy = RetryPolicy(),
        timeout_s: float = 60.0,
        batch_cap: int = 64,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self.batch_cap = batch_cap
        self._client = httpx.Client(timeout=timeout_s)
        self._call = with_rate_limit_and_retry(self._post, policy)
        self._dim: int | None = None

    def _post(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        obj = _post_protocol(
            self._client, self.endpoint + EMBED_PATH, {"texts": list(texts)}, self.api_key
        )
        try:
            vectors = [tuple(float(x) for x in vec) for vec in obj["vectors"]]
            dim = int(obj["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderError(
                f"embedding count mismatch: sent {len(texts)} texts, got {len(vectors)}"
            )
        if any(len(vec) != dim for vec in vectors):
            raise ProviderError("embedding response vectors do not match advertised dim")
        if self._dim is None:
            self._dim = dim
        elif dim != self._dim:
            raise ProviderError(f"embedding dimension drift: {self._dim} -> {dim}")
        return vectors

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        _validate_embed_input(texts)
        vectors: list[EmbeddingVector] = []
        for start in range(0, len(texts), self.batch_cap):
            vectors.extend(self._call(texts[start : start + self.batch_cap]))
        return vectors

    def close(self) -> None:
        self._client.close()


def _validate_embed_input(texts: Sequence[str]) -> None:
    if not texts:
        raise ProviderError("embed requires at least one text")
    if any(not text for text in texts):
        raise ProviderError("embed texts must be non-empty")


# --- deterministic mocks -------------------------------------------------------

def _seeded_rng(seed: int, *parts: str) -> random.Random:
    digest = hashlib.sha256(("|".join([str(seed), *parts])).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


_QUOTED_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')
_SLOT_RE = re.compile(r'^\s*(\d+)\.\s+"((?:[^"\\]|\\.)*)"\s*$', re.MULTILINE)

_MOCK_NOUNS = (
    "casa", "animal", "persona", "objeto", "instrumento", "lugar", "costumbre",
    "planta", "herramienta", "sustancia", "fenómeno", "sentimiento", "proceso",
    "grupo", "materia", "alimento", "prenda", "máquina", "juego", "técnica",
)
_MOCK_VERBS = (
    "mover", "proteger", "medir", "cortar", "unir", "guardar", "mostrar",
    "cambiar", "construir", "limpiar", "comunicar", "transportar", "estudiar",
    "decorar", "reparar", "ordenar",
)
_MOCK_ADJS = (
    "pequeño", "grande", "antiguo", "moderno", "ligero", "común", "particular",
    "intenso", "suave", "frecuente",
)
_MOCK_ENGLISH = ("Grass.", "Paycheck.", "Thing.", "Stone.", "Bird.")


def mock_definition(seed: int, surface: str) -> str:
    """Deterministic canned definition for a lemma. Most outputs are clean
    generic glosses; a stable minority reproduce the known failure shapes
    (circular openings, noun-as-verb, English one-worders, bare echoes) so
    that downstream error statistics have something to find."""
    rng = _seeded_rng(seed, "def", surface)
    roll = rng.random()
    noun, other_noun = rng.choice(_MOCK_NOUNS), rng.choice(_MOCK_NOUNS)
    verb, adj = rng.choice(_MOCK_VERBS), rng.choice(_MOCK_ADJS)
    if roll < 0.12:
        article = rng.choice(("El", "Un"))
        return f"{article} {surface} es {noun} que sirve para {verb}."
    if roll < 0.18:
        return f"Verbo que significa {verb} algo de forma {adj}."
    if roll < 0.23:
        return rng.choice(_MOCK_ENGLISH)
    if roll < 0.27:
        return f"{surface}."
    body = rng.choice(
        (
            f"Cosa o {noun} que se relaciona con {other_noun}",
            f"{noun.capitalize()} {adj} que sirve para {verb}",
            f"Acción y efecto de {verb}",
            f"Persona que suele {verb} con {noun}",
            f"Cualidad de lo que es {adj}",
            f"De manera {adj}",
            f"{noun.capitalize()} que permite {verb} {other_noun} {adj}",
        )
    )
    return body + "."


def _count_tokens(text: str) -> int:
    return len(text.split())


class MockCompletionProvider:
    """Offline completion provider: a pure function of (seed, prompt).

    Batched prompts (numbered quoted slots) are answered in the same numbered
    format, echoing each quoted lemma. ``drop_in_batch`` suppresses those
    lemmas' slots in batched answers only, which is how tests plant alignment
    failures that single-lemma retries then repair. ``transient_failures``
    makes the first N calls raise TransientProviderError.
    """

    def __init__(
        self,
        seed: int = 0,
        drop_in_batch: frozenset[str] | set[str] = frozenset(),
        transient_failures: int = 0,
    ):
        self.seed = seed
        self.drop_in_batch = frozenset(drop_in_batch)
        self._transient_remaining = transient_failures

    def complete(self, request: CompletionRequest) -> CompletionResult:
        if self._transient_remaining > 0:
            self._transient_remaining -= 1
            raise TransientProviderError("mock transient failure")
        slots = _SLOT_RE.findall(request.prompt)
        if slots:
            lines = []
            for index, escaped in slots:
                surface = escaped.replace('\\"', '"')
                if surface in self.drop_in_batch:
                    continue
                lines.append(f'{index}. "{escaped}": {mock_definition(self.seed, surface)}')
            text = "\n".join(lines)
        else:
            quoted = _QUOTED_RE.findall(request.prompt)
            if not quoted:
                raise ProviderError("mock completion found no quoted lemma in prompt")
            surface = quoted[-1].replace('\\"', '"')
            text = mock_definition(self.seed, surface)
        return CompletionResult(
            text=text,
            tokens_prompt=_count_tokens(request.prompt),
            tokens_completion=_count_tokens(text),
        )


class MockEmbeddingProvider:
    """Offline embedding provider: hashed token multisets mapped to unit
    vectors. Texts sharing tokens get higher cosine; token order is ignored,
    so paraphrases with the same words collide on purpose."""

    def __init__(self, seed: int = 0, dim: int = 64):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.seed = seed
        self.dim = dim

    def _token_index(self, token: str) -> tuple[int, float]:
        digest = hashlib.sha256(
            f"{self.seed}|tok|{token}".encode("utf-8")
        ).digest()
        value = int.from_bytes(digest[:8], "big")
        sign = 1.0 if digest[8] & 1 else -1.0
        return value % self.dim, sign

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        _validate_embed_input(texts)
        vectors = []
        for text in texts:
            components = [0.0] * self.dim
            tokens = tokenize(text) or (text,)
            for token in tokens:
                index, sign = self._token_index(token)
                components[index] += sign
            norm = math.sqrt(math.fsum(x * x for x in components))
            if norm == 0.0:
                # Signed counts cancelled out; fall back to a single slot so
                # the vector stays usable for cosine.
                index, _sign = self._token_index("|".join(tokens))
                components[index] = 1.0
                norm = 1.0
            vectors.append(tuple(x / norm for x in components))
        return vectors
