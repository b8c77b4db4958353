"""HTTP service: lifecycle routing, sessions via cookie, admin endpoints."""

from __future__ import annotations

import argparse
import logging
import os
import threading
from http.cookies import SimpleCookie
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qsl, urlsplit

from .app import Application, AppConfigError, UnknownViewError, load_app_config
from .lifecycle import (
    MalformedAjaxError,
    RequestEnvelope,
    UnknownRenderTargetError,
    process_request,
)
from .pointcuts import PointcutError
from .provenance import canonical_json
from .sessions import SessionStore

log = logging.getLogger(__name__)

FALLBACK_OVERLAY = (
    '"use strict";console.warn("pathtrace overlay script is not built; '
    'run npm run build in frontend/ and point overlay_file at dist/overlay.js");\n'
)


def parse_bind_address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"bad bind address {text!r}, expected host:port")
    return host, int(port)


class PathtraceServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], app: Application,
                 profile: str = "dev", force_off: bool = False):
        self.app = app
        self.store = SessionStore()
        self.profile = profile
        self.force_off = force_off
        self._id_lock = threading.Lock()
        self._id_counter = 0
        super().__init__(address, RequestHandler)

    def next_request_id(self) -> str:
        with self._id_lock:
            self._id_counter += 1
            return f"r{self._id_counter:06d}"

    def instrumentation_for(self, override: str | None) -> bool:
        if self.profile == "prod" or self.force_off:
            return False
        if override == "on":
            return True
        if override == "off":
            return False
        return self.app.config.instrumentation_default


class RequestHandler(BaseHTTPRequestHandler):
    server_version = "pathtrace/0.1"
    protocol_version = "HTTP/1.1"
    server: PathtraceServer

    def log_message(self, format: str, *args) -> None:
        log.debug("%s %s", self.address_string(), format % args)

    def do_GET(self) -> None:
        url = urlsplit(self.path)
        if url.path == "/healthz":
            self._send(200, "ok\n", "text/plain; charset=utf-8")
        elif url.path == "/__prov/overlay.js":
            self._send_overlay()
        elif url.path.startswith("/pages/"):
            self._page("GET", url)
        else:
            self._send(404, "not found\n", "text/plain; charset=utf-8")

    def do_POST(self) -> None:
        url = urlsplit(self.path)
        if url.path == "/__prov/reload":
            self._reload()
        elif url.path.startswith("/pages/"):
            self._page("POST", url)
        else:
            self._send(404, "not found\n", "text/plain; charset=utf-8")

    def _send_overlay(self) -> None:
        overlay = self.server.app.config.overlay_file
        if overlay is not None and overlay.is_file():
            body = overlay.read_text(encoding="utf-8")
        else:
            body = FALLBACK_OVERLAY
        self._send(200, body, "application/javascript; charset=utf-8")

    def _reload(self) -> None:
        if self.server.profile == "prod":
            self._send(404, "not found\n", "text/plain; charset=utf-8")
            return
        try:
            old, new = self.server.app.reload_aspects()
        except (OSError, PointcutError) as exc:
            self._send(500, f"reload failed: {exc}\n", "text/plain; charset=utf-8")
            return
        body = canonical_json({"old_bindings": old, "new_bindings": new}) + "\n"
        self._send(200, body, "application/json; charset=utf-8")

    def _page(self, method: str, url) -> None:
        request_id = self.server.next_request_id()
        params: dict[str, list[str]] = {}
        for name, value in parse_qsl(url.query, keep_blank_values=True):
            params.setdefault(name, []).append(value)
        if method == "POST":
            length = int(self.headers.get("Content-Length", "0") or "0")
            body = self.rfile.read(length).decode("utf-8") if length else ""
            for name, value in parse_qsl(body, keep_blank_values=True):
                params.setdefault(name, []).append(value)
        override = params.pop("__prov", [None])[0]
        ajax = self.headers.get("X-Ajax", "").lower() == "true"
        if ajax and method != "POST":
            self._send(400, "X-Ajax is only valid on POST\n", "text/plain; charset=utf-8")
            return
        enabled = self.server.instrumentation_for(override)
        env = RequestEnvelope(
            method=method,
            path=url.path,
            params=params,
            ajax=ajax,
            session_id=self._session_cookie(),
            request_id=request_id,
        )
        try:
            response, session = process_request(
                self.server.app, env, self.server.store, enabled=enabled
            )
        except UnknownViewError as exc:
            self._send(404, f"{exc}\n", "text/plain; charset=utf-8",
                       {"X-Request-Id": request_id})
            return
        except (MalformedAjaxError, UnknownRenderTargetError) as exc:
            self._send(400, f"{exc}\n", "text/plain; charset=utf-8",
                       {"X-Request-Id": request_id})
            return
        except Exception:
            log.exception("request %s failed", request_id)
            self._send(500, f"internal error (request {request_id})\n",
                       "text/plain; charset=utf-8", {"X-Request-Id": request_id})
            return
        headers = dict(response.headers)
        if session.id != env.session_id:
            headers["Set-Cookie"] = f"SID={session.id}; Path=/; HttpOnly"
        self._send(response.status, response.body, response.content_type, headers)

    def _session_cookie(self) -> str | None:
        header = self.headers.get("Cookie")
        if not header:
            return None
        cookie = SimpleCookie()
        try:
            cookie.load(header)
        except Exception:
            return None
        morsel = cookie.get("SID")
        return morsel.value if morsel else None

    def _send(self, status: int, body: str, content_type: str,
              headers: dict[str, str] | None = None) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        for name, value in (headers or {}).items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(data)


def serve(config_path: str, *, bind: str | None = None, force_off: bool = False,
          profile: str | None = None) -> PathtraceServer:
    """Build a ready server; callers drive serve_forever themselves."""
    config = load_app_config(config_path)
    app = Application(config)
    address = parse_bind_address(bind or config.bind_address)
    profile = profile or os.environ.get("PATHTRACE_PROFILE", "dev")
    if profile not in ("dev", "prod"):
        raise AppConfigError(f"PATHTRACE_PROFILE must be dev or prod, not {profile!r}")
    return PathtraceServer(address, app, profile=profile, force_off=force_off)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="pathtrace-server",
                                     description="Run the demo application server.")
    parser.add_argument("--config", default="./app.json", help="path to app.json")
    parser.add_argument("--bind", default=None, help="host:port override")
    parser.add_argument("--no-prov", action="store_true",
                        help="force instrumentation off for every request")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        server = serve(args.config, bind=args.bind, force_off=args.no_prov)
    except (AppConfigError, OSError, ValueError) as exc:
        parser.exit(2, f"error: {exc}\n")
    host, port = server.server_address[:2]
    log.info("serving on http://%s:%s/ (profile=%s)", host, port, server.profile)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
