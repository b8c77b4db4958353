"""Flat dotted-path model store with ``#{...}`` value expressions."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_EXPR_RE = re.compile(r"#\{\s*([A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)\s*\}\Z")
_PATH_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*\Z")


class ModelError(Exception):
    pass


class BadExpressionError(ModelError):
    def __init__(self, text: str):
        super().__init__(f"not a value expression: {text!r}")
        self.text = text


@dataclass
class ModelBag:
    """String-to-string store keyed by dotted paths like ``user.name``."""

    values: dict[str, str] = field(default_factory=dict)

    def get(self, path: str, default: str = "") -> str:
        self._check_path(path)
        return self.values.get(path, default)

    def set(self, path: str, value: str) -> None:
        self._check_path(path)
        self.values[path] = str(value)

    def snapshot(self) -> dict[str, str]:
        return dict(self.values)

    @staticmethod
    def _check_path(path: str):
        if not _PATH_RE.match(path or ""):
            raise ModelError(f"bad model path: {path!r}")


def is_value_expression(text: str) -> bool:
    return bool(_EXPR_RE.match(text))


def expression_path(text: str) -> str:
    m = _EXPR_RE.match(text)
    if m is None:
        raise BadExpressionError(text)
    return m.group(1)


def resolve_value_expression(bag: ModelBag, text: str) -> str:
    """Resolve ``#{path}`` against the bag; other text passes through as-is."""
    m = _EXPR_RE.match(text)
    if m is None:
        return text
    return bag.get(m.group(1))
