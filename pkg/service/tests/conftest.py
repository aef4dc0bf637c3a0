"""Shared fixtures: the generated world, live servers, trained models."""

from __future__ import annotations

import threading
import time

import pytest
import uvicorn

from victim_service.data import generate_world


class LiveServer:
    """Run an ASGI app with uvicorn on an ephemeral port, in a daemon thread."""

    def __init__(self, app):
        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self.url: str | None = None

    def __enter__(self) -> "LiveServer":
        self._thread.start()
        deadline = time.monotonic() + 15
        while not self._server.started:
            if not self._thread.is_alive():
                raise RuntimeError("server thread exited before startup")
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start within 15s")
            time.sleep(0.02)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        self.url = f"http://127.0.0.1:{port}"
        return self

    def __exit__(self, *exc) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10)


@pytest.fixture(scope="session")
def live_server_cls():
    return LiveServer


@pytest.fixture(scope="session")
def world_dir(tmp_path_factory):
    """The full generated world: 2000 train / 400 test plus resources."""
    out = tmp_path_factory.mktemp("world")
    generate_world(out, seed=7, train_size=2000, test_size=400)
    return out


@pytest.fixture(scope="session")
def mini_world_dir(tmp_path_factory):
    """A small world for fast training tests."""
    out = tmp_path_factory.mktemp("mini_world")
    generate_world(out, seed=13, train_size=240, test_size=60)
    return out
