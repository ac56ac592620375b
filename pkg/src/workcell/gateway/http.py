"""Wire protocol: a small threaded HTTP front over GatewayService.

    POST /v1/command  {session_id, channel, utterance, tick} -> {reply, job_id?}
    GET  /v1/status                                          -> {robot, active_job, queue_depth}
    GET  /v1/events?since=N                                  -> {events: [...], next: N'}
    POST /v1/control  {action}                               -> {ok} | {error}
    POST /v1/scene    {objects: [...]}                       -> {ok, count}
    GET  /v1/frame                                           -> binary PGM frame

Bodies are JSON; responses are serialized with sorted keys so identical
replies are identical bytes.  When a static directory is configured the
operator console is served from it at /.
"""
from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from ..robot import BadSafetyTransition
from .service import CommandRequest, GatewayService, MalformedRequest, UnknownEndpoint

log = logging.getLogger("workcell.http")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
}


class GatewayHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, service: GatewayService, static_dir: str | None = None):
        super().__init__(address, _Handler)
        self.service = service
        self.static_dir = Path(static_dir) if static_dir else None

    @property
    def port(self) -> int:
        return self.server_address[1]


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: GatewayHTTPServer

    def log_message(self, fmt, *args):
        log.debug("%s %s", self.address_string(), fmt % args)

    # -- plumbing ------------------------------------------------------------

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, doc: dict, status: int = 200) -> None:
        body = json.dumps(doc, sort_keys=True).encode("utf-8")
        self._send(status, body, "application/json")

    def _error(self, message: str, status: int = 400) -> None:
        self._send_json({"error": message}, status)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            doc = json.loads(raw or b"{}")
        except json.JSONDecodeError as exc:
            raise MalformedRequest(f"invalid JSON body: {exc}") from None
        if not isinstance(doc, dict):
            raise MalformedRequest("body must be a JSON object")
        return doc

    # -- routes --------------------------------------------------------------

    def do_GET(self):  # noqa: N802 (http.server naming)
        url = urlparse(self.path)
        try:
            if url.path == "/v1/status":
                self._send_json(self.server.service.get_status())
            elif url.path == "/v1/events":
                params = parse_qs(url.query)
                try:
                    since = int(params.get("since", ["0"])[0])
                except ValueError:
                    raise MalformedRequest("since must be an integer") from None
                events, cursor = self.server.service.get_events(since)
                self._send_json({"events": [e.as_dict() for e in events], "next": cursor})
            elif url.path == "/v1/frame":
                self._send(200, self.server.service.frame_pgm(), "image/x-portable-graymap")
            else:
                self._static(url.path)
        except MalformedRequest as exc:
            self._error(str(exc))
        except Exception:
            log.exception("GET %s failed", self.path)
            self._error("internal error", 500)

    def do_POST(self):  # noqa: N802
        url = urlparse(self.path)
        try:
            doc = self._read_json()
            if url.path == "/v1/command":
                for key in ("session_id", "channel", "utterance", "tick"):
                    if key not in doc:
                        raise MalformedRequest(f"missing field {key!r}")
                request = CommandRequest(
                    session_id=doc["session_id"],
                    channel=doc["channel"],
                    utterance=doc["utterance"],
                    tick=doc["tick"],
                )
                self._send_json(self.server.service.submit_command(request).as_dict())
            elif url.path == "/v1/control":
                if "action" not in doc:
                    raise MalformedRequest("missing field 'action'")
                self._send_json(self.server.service.control(doc["action"]))
            elif url.path == "/v1/scene":
                if "objects" not in doc or not isinstance(doc["objects"], list):
                    raise MalformedRequest("missing 'objects' array")
                try:
                    self._send_json(self.server.service.set_scene(doc["objects"]))
                except (KeyError, TypeError, ValueError) as exc:
                    raise MalformedRequest(f"bad scene: {exc}") from None
            else:
                self._error("not found", 404)
        except MalformedRequest as exc:
            self._error(str(exc))
        except UnknownEndpoint as exc:
            self._error(f"unknown endpoint: {exc}")
        except BadSafetyTransition as exc:
            self._error(str(exc), 409)
        except Exception:
            log.exception("POST %s failed", self.path)
            self._error("internal error", 500)

    def _static(self, path: str) -> None:
        root = self.server.static_dir
        if root is None:
            self._error("not found", 404)
            return
        name = path.lstrip("/") or "index.html"
        target = (root / name).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._error("not found", 404)
            return
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), content_type)


def serve(service: GatewayService, port: int = 0, host: str = "127.0.0.1",
          static_dir: str | None = None) -> tuple[GatewayHTTPServer, threading.Thread]:
    """Start the HTTP server on a background thread; returns (server, thread)."""
    server = GatewayHTTPServer((host, port), service, static_dir)
    thread = threading.Thread(target=server.serve_forever, name="gateway-http", daemon=True)
    thread.start()
    log.info("gateway listening on %s:%d", host, server.port)
    return server, thread
