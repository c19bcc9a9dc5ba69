from __future__ import annotations

import http.server
import threading
from pathlib import Path

import pytest

from pipelint.engine import Environment
from pipelint.llm import Provider, ProviderConfig

FIXTURES = Path(__file__).parent / "fixtures"


class CountingTransport:
    """Records every transport call; stub/replay modes must never reach it."""

    def __init__(self) -> None:
        self.calls = 0

    def __call__(self, config, system_prompt, user_prompt, model_id) -> str:
        self.calls += 1
        raise AssertionError("transport invoked in a hermetic mode")


def make_stub_env(**overrides) -> Environment:
    transport = CountingTransport()
    provider = Provider(ProviderConfig(mode="stub"), transport=transport)
    env = Environment(provider=provider, **overrides)
    env.transport_calls = transport  # stashed for hermeticity assertions
    return env


@pytest.fixture
def stub_env() -> Environment:
    return make_stub_env()


class _LoopbackHandler(http.server.BaseHTTPRequestHandler):
    """Fixture endpoints: /ok 200, /moved 301, /missing 404, /slow stalls."""

    stall_event: threading.Event

    def do_GET(self):  # noqa: N802  (stdlib handler naming)
        if self.path.startswith("/ok"):
            body = b"ok"
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        elif self.path.startswith("/moved"):
            self.send_response(301)
            self.send_header("Location", "/ok")
            self.send_header("Content-Length", "0")
            self.end_headers()
        elif self.path.startswith("/slow"):
            self.stall_event.wait(30)
            self.send_response(200)
            self.send_header("Content-Length", "0")
            self.end_headers()
        else:
            self.send_response(404)
            self.send_header("Content-Length", "0")
            self.end_headers()

    def log_message(self, fmt, *args):
        pass


class LoopbackServer:
    def __init__(self) -> None:
        handler = type("Handler", (_LoopbackHandler,), {"stall_event": threading.Event()})
        self.handler = handler
        self.httpd = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self) -> str:
        host, port = self.httpd.server_address[:2]
        return f"http://{host}:{port}"

    def url(self, path: str) -> str:
        return self.base_url + path

    def close(self) -> None:
        self.handler.stall_event.set()
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture(scope="session")
def loopback():
    server = LoopbackServer()
    yield server
    server.close()
