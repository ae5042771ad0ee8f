"""FastAPI service implementing the completion/embedding wire protocol:

    POST /v1/embed     {texts: [...]}                  -> {vectors, dim}
    POST /v1/complete  {prompt, max_tokens, temperature} -> {text, tokens_prompt,
                                                             tokens_completion}
    GET  /healthz                                      -> {dim}

Embeddings come from the configured encoder (loaded once at startup,
inference serialized). Completions are proxied to an optional upstream
OpenAI-style endpoint; without one, /v1/complete answers 501.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass

import httpx
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .encoders import DEFAULT_MODEL, Encoder, build_encoder

DEFAULT_BATCH_CAP = 64


@dataclass
class ShimConfig:
    encoder_spec: str = DEFAULT_MODEL
    batch_cap: int = DEFAULT_BATCH_CAP
    upstream_url: str | None = None
    upstream_key: str | None = None
    upstream_model: str | None = None
    host: str = "127.0.0.1"
    port: int = 8080
    timeout_s: float = 60.0

    @classmethod
    def from_env(cls, environ=os.environ) -> "ShimConfig":
        return cls(
            encoder_spec=environ.get("LEXISHIM_ENCODER", DEFAULT_MODEL),
            batch_cap=int(environ.get("LEXISHIM_BATCH_CAP", DEFAULT_BATCH_CAP)),
            upstream_url=environ.get("LEXISHIM_UPSTREAM") or None,
            upstream_key=environ.get("LEXISHIM_UPSTREAM_KEY") or None,
            upstream_model=environ.get("LEXISHIM_UPSTREAM_MODEL") or None,
            host=environ.get("LEXISHIM_HOST", "127.0.0.1"),
            port=int(environ.get("LEXISHIM_PORT", 8080)),
        )


class EmbedRequest(BaseModel):
    texts: list[str]


class EmbedResponse(BaseModel):
    vectors: list[list[float]]
    dim: int


class CompleteRequest(BaseModel):
    prompt: str
    max_tokens: int = Field(default=256, gt=0)
    temperature: float = Field(default=0.5, ge=0.0, le=2.0)


class CompleteResponse(BaseModel):
    text: str
    tokens_prompt: int
    tokens_completion: int


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(config: ShimConfig | None = None, encoder: Encoder | None = None) -> FastAPI:
    config = config or ShimConfig.from_env()
    encoder = encoder or build_encoder(config.encoder_spec)
    encode_lock = threading.Lock()

    app = FastAPI(title="lexishim", version="0.1.0")
    app.state.config = config
    app.state.encoder = encoder

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(400, f"invalid request: {exc.errors()[0].get('msg', 'bad body')}")

    @app.get("/healthz")
    def healthz():
        return {"dim": encoder.dim, "encoder": encoder.name}

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        if not request.texts:
            return _error(400, "texts must be a non-empty list")
        if len(request.texts) > config.batch_cap:
            return _error(
                400, f"batch of {len(request.texts)} exceeds the cap of {config.batch_cap}"
            )
        if any(not text for text in request.texts):
            return _error(400, "texts must be non-empty strings")
        try:
            with encode_lock:
                vectors = encoder.encode(request.texts)
        except Exception as exc:  # encoder failure is a server-side error
            return _error(500, f"encoder failure: {exc}")
        return EmbedResponse(vectors=vectors, dim=encoder.dim)

    @app.post("/v1/complete")
    def complete(request: CompleteRequest, raw_request: Request):
        if not config.upstream_url:
            return _error(501, "no upstream completion endpoint configured")
        payload: dict = {
            "prompt": request.prompt,
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }
        if config.upstream_model:
            payload["model"] = config.upstream_model
        headers = {}
        bearer = config.upstream_key or _incoming_bearer(raw_request)
        if bearer:
            headers["Authorization"] = f"Bearer {bearer}"
        try:
            response = httpx.post(
                config.upstream_url, json=payload, headers=headers, timeout=config.timeout_s
            )
        except httpx.HTTPError as exc:
            return _error(502, f"upstream unreachable: {exc}")
        if response.status_code != 200:
            return _error(502, f"upstream returned {response.status_code}: {response.text}")
        try:
            body = response.json()
            text = body["choices"][0]["text"]
            usage = body.get("usage", {})
            result = CompleteResponse(
                text=text,
                tokens_prompt=int(usage.get("prompt_tokens", 0)),
                tokens_completion=int(usage.get("completion_tokens", 0)),
            )
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            return _error(502, f"upstream response not understood: {exc}")
        return result

    return app


def _incoming_bearer(request: Request) -> str | None:
    header = request.headers.get("Authorization", "")
    if header.startswith("Bearer "):
        return header.removeprefix("Bearer ")
    return None
