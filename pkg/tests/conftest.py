import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from evoxplain.bench import ScenarioSpec, make_scenario


@pytest.fixture(scope="session")
def tiles12():
    """Small synthetic scenario with known salient/distractor superpixels."""
    return make_scenario(ScenarioSpec("tiles-12"))


@pytest.fixture
def uniform16():
    from evoxplain import RasterImage
    return RasterImage(np.full((16, 16, 3), 128, np.uint8))


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def do_GET(self):
        self.server.app(self, "GET")

    def do_POST(self):
        self.server.app(self, "POST")


@pytest.fixture
def mock_endpoint():
    """Start a throwaway HTTP server; yields a factory taking an app callable
    (handler, method) -> None and returning the base URL."""
    servers = []

    def start(app):
        server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        server.app = app
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_address[1]}"

    yield start
    for server in servers:
        server.shutdown()
        server.server_close()


def json_app(health_body=None, predict_body=None, status=200, delay=0.0):
    """Simple wire-protocol stub serving fixed JSON bodies."""
    import time

    def app(handler, method):
        if delay:
            time.sleep(delay)
        if method == "GET" and handler.path == "/healthz":
            body, code = health_body, 200 if health_body is not None else 404
        elif method == "POST" and handler.path == "/predict":
            body, code = predict_body, status
        else:
            body, code = {"error": "not found"}, 404
        payload = json.dumps(body if body is not None else {"error": "none"}).encode()
        handler.send_response(code)
        handler.send_header("Content-Type", "application/json")
        handler.send_header("Content-Length", str(len(payload)))
        handler.end_headers()
        handler.wfile.write(payload)

    return app
