"""Run the shim: `python -m lexishim [--host H] [--port P] [--encoder SPEC]`.

Environment: LEXISHIM_ENCODER, LEXISHIM_BATCH_CAP, LEXISHIM_UPSTREAM,
LEXISHIM_UPSTREAM_KEY, LEXISHIM_UPSTREAM_MODEL, LEXISHIM_HOST, LEXISHIM_PORT.
Flags override the environment.
"""

from __future__ import annotations

import argparse

import uvicorn

from .app import ShimConfig, create_app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lexishim")
    parser.add_argument("--host")
    parser.add_argument("--port", type=int)
    parser.add_argument("--encoder", help='model id, "hash", or "hash:<dim>"')
    parser.add_argument("--upstream", help="upstream completions URL to proxy")
    parser.add_argument("--upstream-model")
    args = parser.parse_args(argv)

    config = ShimConfig.from_env()
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.encoder:
        config.encoder_spec = args.encoder
    if args.upstream:
        config.upstream_url = args.upstream
    if args.upstream_model:
        config.upstream_model = args.upstream_model

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
