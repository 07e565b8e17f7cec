"""HTTP front end for the interactive oracle, plus static UI hosting.

Endpoints:
  GET  /api/next-query  -> {"pair": [id1, id2], "left": rec, "right": rec}, or 204
  POST /api/answer      <- {"pair": [id1, id2], "same": true|false}
  GET  /api/stats       -> {"answered": k, "pending": 0|1}

Answers for a pair other than the currently pending one come back 409; the
client is expected to discard and re-poll.  Record payloads never include
the ground-truth cluster label: the human is the oracle, not its reader.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .core import Dataset, Record
from .oracle import InteractiveOracle


def record_payload(record: Record) -> dict:
    return {"id": record.id, "text": record.text, "features": record.features}


class OracleHttpServer:
    """Owns the listening socket and a serving thread."""

    def __init__(
        self,
        oracle: InteractiveOracle,
        dataset: Dataset,
        host: str = "127.0.0.1",
        port: int = 7341,
        ui_dir: Optional[str] = None,
    ):
        self.oracle = oracle
        self.dataset = dataset
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        handler = _make_handler(self)
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self.port = self.httpd.server_address[1]
        self._thread: Optional[threading.Thread] = None

    def start(self):
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self):
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def _make_handler(server: OracleHttpServer):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, status: int, payload: dict):
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_empty(self, status: int):
            self.send_response(status)
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            path = self.path.split("?", 1)[0]
            if path == "/api/next-query":
                pair = server.oracle.current_query()
                if pair is None:
                    self._send_empty(204)
                    return
                left = server.dataset.require_id(pair[0])
                right = server.dataset.require_id(pair[1])
                self._send_json(
                    200,
                    {
                        "pair": [pair[0], pair[1]],
                        "left": record_payload(left),
                        "right": record_payload(right),
                    },
                )
            elif path == "/api/stats":
                self._send_json(200, server.oracle.stats())
            elif path.startswith("/api/"):
                self._send_json(404, {"code": "not-found", "message": path})
            else:
                self._send_static(path)

        def do_POST(self):
            path = self.path.split("?", 1)[0]
            if path != "/api/answer":
                self._send_json(404, {"code": "not-found", "message": path})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length).decode("utf-8"))
                pair = payload["pair"]
                same = payload["same"]
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not isinstance(same, bool)
                ):
                    raise ValueError("bad shape")
            except (ValueError, KeyError, json.JSONDecodeError):
                self._send_json(
                    400, {"code": "schema", "message": "expected {pair: [a, b], same: bool}"}
                )
                return
            if server.oracle.submit((pair[0], pair[1]), same):
                self._send_json(200, {"ok": True, "answered": server.oracle.answered})
            else:
                self._send_json(
                    409,
                    {"code": "stale-pair", "message": "no such pending query"},
                )

        def _send_static(self, path: str):
            if server.ui_dir is None:
                self._send_json(404, {"code": "not-found", "message": "no UI bundle configured"})
                return
            rel = path.lstrip("/") or "index.html"
            target = (server.ui_dir / rel).resolve()
            if server.ui_dir not in target.parents and target != server.ui_dir:
                self._send_json(404, {"code": "not-found", "message": path})
                return
            if target.is_dir():
                target = target / "index.html"
            if not target.is_file():
                self._send_json(404, {"code": "not-found", "message": path})
                return
            ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler
