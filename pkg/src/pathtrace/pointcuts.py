"""Pointcut expressions: parsing, join-point matching, and binding config.

The only supported kind is ``execution(<ret> <type>-><method>(<args>))``.
Globs are restricted to identifier characters, dots and ``*``. A ``*`` that
ends a type pattern crosses dot boundaries (matches any remaining suffix);
every other ``*`` matches a run of identifier characters within one segment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache

_GLOB_CHARS = re.compile(r"[A-Za-z0-9_.*]+\Z")
_IDENT_RUN = "[A-Za-z0-9_]*"
_SUFFIX_RUN = "[A-Za-z0-9_.]*"


class PointcutError(Exception):
    pass


class PointcutSyntaxError(PointcutError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


class UnsupportedKindError(PointcutError):
    def __init__(self, kind: str):
        super().__init__(f"unsupported pointcut kind {kind!r} (only 'execution')")
        self.kind = kind


class AspectConfigError(PointcutError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnknownAdviceError(PointcutError):
    pass


@dataclass(frozen=True)
class JoinPointId:
    """Identity of an interceptable call: unit path, method name, arity."""

    type_path: str
    method: str
    arity: int

    def __post_init__(self):
        if not self.type_path or any(not s for s in self.type_path.split(".")):
            raise ValueError(f"bad unit path: {self.type_path!r}")


@dataclass(frozen=True)
class ArgsPattern:
    kind: str  # "any" | "zero" | "list"
    globs: tuple[str, ...] = ()

    ANY: "ArgsPattern" = None  # type: ignore[assignment]
    ZERO: "ArgsPattern" = None  # type: ignore[assignment]


ArgsPattern.ANY = ArgsPattern("any")
ArgsPattern.ZERO = ArgsPattern("zero")


@dataclass(frozen=True)
class PointcutExpr:
    kind: str
    return_pattern: str
    type_pattern: str
    method_pattern: str
    args_pattern: ArgsPattern

    def __str__(self):
        if self.args_pattern.kind == "any":
            args = ".."
        elif self.args_pattern.kind == "zero":
            args = ""
        else:
            args = ", ".join(self.args_pattern.globs)
        return (
            f"{self.kind}({self.return_pattern} "
            f"{self.type_pattern}->{self.method_pattern}({args}))"
        )


@dataclass(frozen=True)
class Binding:
    pointcut: PointcutExpr
    advice: str
    aspect: str


@dataclass
class AspectConfig:
    aspects: list[str] = field(default_factory=list)
    bindings: list[Binding] = field(default_factory=list)


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def expect(self, ch: str):
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise PointcutSyntaxError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def take(self, pattern: str, what: str) -> str:
        m = re.compile(pattern).match(self.text, self.pos)
        if m is None or not m.group(0):
            raise PointcutSyntaxError(f"expected {what}", self.pos)
        self.pos = m.end()
        return m.group(0)


def _check_glob(glob: str, offset: int) -> str:
    if not _GLOB_CHARS.match(glob):
        raise PointcutSyntaxError(f"bad glob {glob!r}", offset)
    return glob


def parse_pointcut(text: str) -> PointcutExpr:
    """Parse ``execution(<ret> <type>-><method>(<args>))`` with optional spaces."""
    cur = _Cursor(text)
    cur.skip_ws()
    kind = cur.take(r"[A-Za-z_]+", "pointcut kind")
    if kind != "execution":
        raise UnsupportedKindError(kind)
    cur.skip_ws()
    cur.expect("(")
    cur.skip_ws()
    start = cur.pos
    ret = _check_glob(cur.take(r"[A-Za-z0-9_.*]+", "return pattern"), start)
    cur.skip_ws()
    start = cur.pos
    type_glob = _check_glob(cur.take(r"[A-Za-z0-9_.*]+", "type pattern"), start)
    cur.skip_ws()
    cur.expect("-")
    cur.expect(">")
    cur.skip_ws()
    start = cur.pos
    method = _check_glob(cur.take(r"[A-Za-z0-9_*]+", "method pattern"), start)
    cur.skip_ws()
    cur.expect("(")
    cur.skip_ws()
    if cur.text.startswith("..", cur.pos):
        cur.pos += 2
        args = ArgsPattern.ANY
    elif cur.pos < len(cur.text) and cur.text[cur.pos] == ")":
        args = ArgsPattern.ZERO
    else:
        globs = []
        while True:
            start = cur.pos
            globs.append(_check_glob(cur.take(r"[A-Za-z0-9_.*]+", "argument glob"), start))
            cur.skip_ws()
            if cur.pos < len(cur.text) and cur.text[cur.pos] == ",":
                cur.pos += 1
                cur.skip_ws()
                continue
            break
        args = ArgsPattern("list", tuple(globs))
    cur.skip_ws()
    cur.expect(")")
    cur.skip_ws()
    cur.expect(")")
    cur.skip_ws()
    if cur.pos != len(cur.text):
        raise PointcutSyntaxError("trailing characters", cur.pos)
    return PointcutExpr("execution", ret, type_glob, method, args)


@lru_cache(maxsize=512)
def _type_regex(glob: str) -> re.Pattern:
    parts = []
    for i, ch in enumerate(glob):
        if ch == "*":
            # A star closing the pattern swallows any suffix, dots included.
            parts.append(_SUFFIX_RUN if i == len(glob) - 1 else _IDENT_RUN)
        else:
            parts.append(re.escape(ch))
    return re.compile("".join(parts) + r"\Z")


@lru_cache(maxsize=512)
def _ident_regex(glob: str) -> re.Pattern:
    parts = [_IDENT_RUN if ch == "*" else re.escape(ch) for ch in glob]
    return re.compile("".join(parts) + r"\Z")


def matches(expr: PointcutExpr, jp: JoinPointId) -> bool:
    """True when the expression selects the join point.

    Join points carry no return or argument type information, so those
    pattern positions match only as the bare wildcard ``*``.
    """
    if expr.return_pattern != "*":
        return False
    if not _type_regex(expr.type_pattern).match(jp.type_path):
        return False
    if not _ident_regex(expr.method_pattern).match(jp.method):
        return False
    args = expr.args_pattern
    if args.kind == "any":
        return True
    if args.kind == "zero":
        return jp.arity == 0
    return jp.arity == len(args.globs) and all(g == "*" for g in args.globs)


def load_aspect_config(text: str) -> AspectConfig:
    """Load the JSON aspect configuration, preserving binding order.

    Exact duplicate bindings collapse to their first occurrence. Advice names
    are resolved later, at weave time, against the registered aspects.
    """
    if not text.strip():
        return AspectConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AspectConfigError(exc.msg, line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise AspectConfigError("top-level value must be an object")
    aspects = data.get("aspects", [])
    raw_bindings = data.get("bindings", [])
    if not isinstance(aspects, list) or not all(isinstance(a, str) for a in aspects):
        raise AspectConfigError("'aspects' must be a list of unit paths")
    if not isinstance(raw_bindings, list):
        raise AspectConfigError("'bindings' must be a list")
    bindings: list[Binding] = []
    seen: set[tuple] = set()
    for idx, raw in enumerate(raw_bindings):
        if not isinstance(raw, dict) or not {"pointcut", "advice", "aspect"} <= raw.keys():
            raise AspectConfigError(f"binding #{idx} needs pointcut/advice/aspect")
        try:
            expr = parse_pointcut(raw["pointcut"])
        except PointcutError as exc:
            raise AspectConfigError(f"binding #{idx}: {exc}") from exc
        binding = Binding(expr, raw["advice"], raw["aspect"])
        key = (expr, binding.advice, binding.aspect)
        if key in seen:
            continue
        seen.add(key)
        bindings.append(binding)
    return AspectConfig(aspects=list(aspects), bindings=bindings)
