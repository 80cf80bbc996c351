"""In-process mock of the issue search API, for tests and offline runs.

Serves ``GET /api/issues/search`` with the same wire shape the real server
uses: bearer auth, ``componentKeys``/``p``/``ps`` query parameters, and a JSON
body carrying ``issues[]`` plus ``paging.total``.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse


class MockSonarServer:
    """Fixture-backed analysis server bound to an ephemeral localhost port.

    Usage::

        with MockSonarServer(issues, token="t", project_key="proj") as server:
            fetch_issues(ServerConfig(server.url, "t", "proj"))

    ``issues`` entries are raw wire dicts: key, component, line, message, type.
    """

    def __init__(self, issues: list[dict], token: str = "token", project_key: str = "proj"):
        self.issues = list(issues)
        self.token = token
        self.project_key = project_key
        self.request_count = 0
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        assert self._httpd is not None, "server not started"
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockSonarServer":
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def do_GET(self):
                server.request_count += 1
                parsed = urlparse(self.path)
                if parsed.path != "/api/issues/search":
                    self._reply(404, {"errors": [{"msg": "unknown endpoint"}]})
                    return
                if self.headers.get("Authorization") != f"Bearer {server.token}":
                    self._reply(401, {"errors": [{"msg": "invalid credentials"}]})
                    return
                query = parse_qs(parsed.query)
                component = query.get("componentKeys", [""])[0]
                if component != server.project_key:
                    self._reply(
                        404,
                        {"errors": [{"msg": f"Component key '{component}' not found"}]},
                    )
                    return
                page = int(query.get("p", ["1"])[0])
                page_size = int(query.get("ps", ["100"])[0])
                start = (page - 1) * page_size
                chunk = server.issues[start : start + page_size]
                self._reply(
                    200,
                    {
                        "issues": chunk,
                        "paging": {
                            "pageIndex": page,
                            "pageSize": page_size,
                            "total": len(server.issues),
                        },
                    },
                )

            def _reply(self, status: int, body: dict):
                payload = json.dumps(body).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "MockSonarServer":
        return self.start()

    def __exit__(self, *exc_info):
        self.stop()
