"""Session store: opaque ids, per-session model state, saved view trees."""

from __future__ import annotations

import copy
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Mapping

from .components import ComponentNode
from .model import ModelBag

_SID_RE = re.compile(r"[0-9a-f]{16}\Z")


def valid_session_id(session_id: str | None) -> bool:
    return bool(session_id and _SID_RE.match(session_id))


@dataclass
class ViewState:
    view_id: str
    tree: list[ComponentNode]
    saved_at: str


@dataclass
class Session:
    id: str
    created_at: float
    model: ModelBag
    view_states: dict[str, ViewState] = field(default_factory=dict)


class SessionStore:
    """Shared across request threads; every public method is one atomic op."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._issued: set[str] = set()

    def get_or_create(
        self, session_id: str | None, model_seed: Mapping[str, str] | None = None
    ) -> tuple[Session, bool]:
        """Return (session, created); unknown or malformed ids get a new session."""
        with self._lock:
            if valid_session_id(session_id) and session_id in self._sessions:
                return self._sessions[session_id], False
            sid = self._new_id_locked()
            session = Session(id=sid, created_at=time.time(), model=ModelBag(dict(model_seed or {})))
            self._sessions[sid] = session
            return session, True

    def _new_id_locked(self) -> str:
        while True:
            sid = secrets.token_hex(8)
            if sid not in self._issued:
                self._issued.add(sid)
                return sid

    def save_view(self, session: Session, view_id: str, roots: list[ComponentNode],
                  request_id: str) -> None:
        state = ViewState(view_id=view_id, tree=copy.deepcopy(roots), saved_at=request_id)
        with self._lock:
            session.view_states[view_id] = state

    def restore_view(self, session: Session, view_id: str) -> list[ComponentNode] | None:
        with self._lock:
            state = session.view_states.get(view_id)
            return None if state is None else copy.deepcopy(state.tree)

    def has_view(self, session: Session, view_id: str) -> bool:
        with self._lock:
            return view_id in session.view_states
