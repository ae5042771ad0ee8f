"""Sentence encoders behind a single interface.

The default backend wraps a multilingual sentence-transformers model
(512-dimensional output). The "hash" backend is a dependency-free,
deterministic stand-in with the same dimension, for offline runs and tests.
"""

from __future__ import annotations

import hashlib
import math
import re
import unicodedata
from typing import Protocol, Sequence

DEFAULT_MODEL = "sentence-transformers/distiluse-base-multilingual-cased-v2"
HASH_DIM = 512

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


class Encoder(Protocol):
    dim: int
    name: str

    def encode(self, texts: Sequence[str]) -> list[list[float]]: ...


class HashEncoder:
    """Signed hashed-token bag mapped to a unit vector. Deterministic across
    processes; texts sharing words land closer together."""

    def __init__(self, dim: int = HASH_DIM):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.name = f"hash-{dim}"

    def _slot(self, token: str) -> tuple[int, float]:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        index = int.from_bytes(digest[:8], "big") % self.dim
        sign = 1.0 if digest[8] & 1 else -1.0
        return index, sign

    def encode(self, texts: Sequence[str]) -> list[list[float]]:
        vectors = []
        for text in texts:
            normalized = unicodedata.normalize("NFC", text).lower()
            tokens = _TOKEN_RE.findall(normalized) or [normalized or "<empty>"]
            components = [0.0] * self.dim
            for token in tokens:
                index, sign = self._slot(token)
                components[index] += sign
            norm = math.sqrt(math.fsum(x * x for x in components))
            if norm == 0.0:
                index, _sign = self._slot("||".join(tokens))
                components[index] = 1.0
                norm = 1.0
            vectors.append([x / norm for x in components])
        return vectors


class SentenceTransformerEncoder:
    """Real model backend; loaded once, inference is serialized by the app."""

    def __init__(self, model_name: str = DEFAULT_MODEL):
        from sentence_transformers import SentenceTransformer

        self._model = SentenceTransformer(model_name)
        self.dim = int(self._model.get_sentence_embedding_dimension())
        self.name = model_name

    def encode(self, texts: Sequence[str]) -> list[list[float]]:
        vectors = self._model.encode(
            list(texts), convert_to_numpy=True, show_progress_bar=False
        )
        return [[float(x) for x in vector] for vector in vectors]


def build_encoder(spec: str) -> Encoder:
    """"hash" or "hash:<dim>" for the offline backend, anything else is a
    sentence-transformers model identifier."""
    if spec == "hash":
        return HashEncoder()
    if spec.startswith("hash:"):
        return HashEncoder(dim=int(spec.split(":", 1)[1]))
    return SentenceTransformerEncoder(spec)
