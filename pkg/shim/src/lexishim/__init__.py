"""lexishim: a small HTTP service exposing a multilingual sentence encoder
(and an optional completion proxy) over the lexigen wire protocol."""

from .app import ShimConfig, create_app
from .encoders import DEFAULT_MODEL, HashEncoder, SentenceTransformerEncoder, build_encoder

__all__ = [
    "DEFAULT_MODEL",
    "HashEncoder",
    "SentenceTransformerEncoder",
    "ShimConfig",
    "build_encoder",
    "create_app",
]

__version__ = "0.1.0"
