from __future__ import annotations

import itertools
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, replace

import pytest

from oracles import TemplateSampler
from pathtrace.app import Application, load_app_config
from pathtrace.demo import demo_config_path, demo_root
from pathtrace.lifecycle import RequestEnvelope, process_request
from pathtrace.sessions import SessionStore

_request_ids = itertools.count(1)


def next_request_id() -> str:
    return f"t{next(_request_ids):06d}"


@pytest.fixture(scope="session")
def demo_app() -> Application:
    return Application(load_app_config(demo_config_path()))


@pytest.fixture
def store() -> SessionStore:
    return SessionStore()


@dataclass
class Driver:
    """Runs in-process requests against one application and session store."""

    app: Application
    store: SessionStore
    session_id: str | None = None
    enabled: bool = True
    session: object = None

    def _run(self, env: RequestEnvelope):
        response, session = process_request(
            self.app, env, self.store, enabled=self.enabled
        )
        self.session_id = session.id
        self.session = session
        return response

    def get(self, view: str, **params: str):
        return self._run(self._env("GET", view, params, ajax=False))

    def post(self, view: str, **params: str):
        return self._run(self._env("POST", view, params, ajax=False))

    def ajax(self, view: str, **params: str):
        return self._run(self._env("POST", view, params, ajax=True))

    def _env(self, method: str, view: str, params: dict[str, str], ajax: bool
             ) -> RequestEnvelope:
        return RequestEnvelope(
            method=method,
            path=f"/pages/{view}",
            params={k: [v] for k, v in params.items()},
            ajax=ajax,
            session_id=self.session_id,
            request_id=next_request_id(),
        )


@pytest.fixture
def driver(demo_app, store) -> Driver:
    return Driver(demo_app, store)


@pytest.fixture(scope="session")
def generated_pages(tmp_path_factory) -> list[tuple[str, str]]:
    return TemplateSampler(seed=20260823).corpus(120)


@pytest.fixture(scope="session")
def generated_app(tmp_path_factory, demo_app, generated_pages) -> Application:
    """Demo application wiring pointed at a directory of generated pages."""
    pages = tmp_path_factory.mktemp("gen_pages")
    for name, text in generated_pages:
        (pages / name).write_text(text, encoding="utf-8")
    config = replace(demo_app.config, pages_dir=pages)
    return Application(config)


@dataclass
class HttpReply:
    status: int
    body: str
    headers: dict[str, str]


class HttpClient:
    """Minimal cookie-keeping client for the live server tests."""

    def __init__(self, base_url: str):
        self.base_url = base_url
        self.cookie: str | None = None

    def request(self, method: str, path: str, *, data: dict[str, str] | None = None,
                headers: dict[str, str] | None = None) -> HttpReply:
        body = urllib.parse.urlencode(data).encode("ascii") if data is not None else None
        req = urllib.request.Request(self.base_url + path, data=body, method=method)
        if body is not None:
            req.add_header("Content-Type", "application/x-www-form-urlencoded")
        if self.cookie:
            req.add_header("Cookie", self.cookie)
        for name, value in (headers or {}).items():
            req.add_header(name, value)
        try:
            with urllib.request.urlopen(req, timeout=10) as resp:
                reply = HttpReply(resp.status, resp.read().decode("utf-8"),
                                  dict(resp.headers.items()))
        except urllib.error.HTTPError as err:
            reply = HttpReply(err.code, err.read().decode("utf-8"),
                              dict(err.headers.items()))
        set_cookie = reply.headers.get("Set-Cookie")
        if set_cookie:
            self.cookie = set_cookie.split(";", 1)[0]
        return reply

    def get(self, path: str, **kw) -> HttpReply:
        return self.request("GET", path, **kw)

    def post(self, path: str, data: dict[str, str] | None = None, **kw) -> HttpReply:
        return self.request("POST", path, data=data or {}, **kw)


__all__ = ["Driver", "HttpClient", "HttpReply", "next_request_id", "demo_root"]
