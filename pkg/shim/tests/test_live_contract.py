"""Protocol conformance over a live socket: the client package's wire
contract checks run against a real uvicorn instance of the shim."""

import threading
import time

import pytest
import uvicorn

from lexigen.contract import run_all_checks
from lexigen.providers import (
    CompletionRequest,
    HttpCompletionProvider,
    HttpEmbeddingProvider,
    RetryPolicy,
)
from lexigen.textmetrics import cosine
from lexishim.app import ShimConfig, create_app

from test_app import UpstreamStub


class LiveShim:
    def __init__(self, config: ShimConfig):
        self.server = uvicorn.Server(
            uvicorn.Config(create_app(config), host="127.0.0.1", port=0, log_level="warning")
        )
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    @property
    def base_url(self) -> str:
        sock = self.server.servers[0].sockets[0]
        host, port = sock.getsockname()[:2]
        return f"http://{host}:{port}"

    def __enter__(self):
        self.thread.start()
        deadline = time.monotonic() + 15.0
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("shim did not start in time")
            time.sleep(0.02)
        return self

    def __exit__(self, *exc_info):
        self.server.should_exit = True
        self.thread.join(timeout=10.0)
        return False


def test_contract_suite_passes_against_live_shim():
    with LiveShim(ShimConfig(encoder_spec="hash")) as shim:
        report = run_all_checks(shim.base_url, expect_dim=512)
        assert report.dim == 512
        assert report.complete_status == "unconfigured"


def test_contract_suite_with_proxied_completion():
    with UpstreamStub() as upstream:
        config = ShimConfig(encoder_spec="hash", upstream_url=upstream.url)
        with LiveShim(config) as shim:
            report = run_all_checks(shim.base_url, expect_dim=512)
            assert report.complete_status == "ok"


def test_primary_http_providers_speak_to_live_shim():
    with UpstreamStub() as upstream:
        config = ShimConfig(encoder_spec="hash", upstream_url=upstream.url)
        with LiveShim(config) as shim:
            embedder = HttpEmbeddingProvider(shim.base_url, policy=RetryPolicy(rpm=1000))
            vectors = embedder.embed(["casa", "casa", "perro"])
            assert vectors[0] == vectors[1]
            assert cosine(vectors[0], vectors[0]) == pytest.approx(1.0, abs=1e-6)
            assert len(vectors[0]) == 512
            embedder.close()

            completer = HttpCompletionProvider(shim.base_url, policy=RetryPolicy(rpm=1000))
            result = completer.complete(CompletionRequest('Define "casa".', 64))
            assert result.text
            assert result.tokens_prompt > 0 and result.tokens_completion > 0
            completer.close()


def test_batch_cap_enforced_over_live_socket():
    with LiveShim(ShimConfig(encoder_spec="hash", batch_cap=4)) as shim:
        import httpx

        response = httpx.post(
            shim.base_url + "/v1/embed", json={"texts": ["x"] * 5}, timeout=30.0
        )
        assert response.status_code == 400
        assert "error" in response.json()
