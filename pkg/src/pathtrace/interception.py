"""Advice-chain machinery at the framework's dispatch points.

Every interceptable operation funnels through dispatch(): when a request
context is active and bindings match the join point, matched advices wrap
the original operation in binding order, each resuming the chain with
invoke_next(). Without a context, matches, or with collection disabled,
the original runs untouched.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .pointcuts import AspectConfig, Binding, JoinPointId, UnknownAdviceError, matches
from .provenance import MetadataCollector
from .template import SourceLocation


class AdviceProtocolViolation(RuntimeError):
    """An advice broke the invoke-next contract (skipped it or repeated it)."""


@dataclass(frozen=True)
class BoundAdvice:
    binding: Binding
    body: Callable[["Invocation"], Any]


@dataclass(frozen=True)
class ViolationNote:
    join_point: JoinPointId
    message: str


@dataclass
class RequestContext:
    request_id: str
    session_id: str | None
    collector: MetadataCollector
    bound: tuple[BoundAdvice, ...] = ()
    violations: list[ViolationNote] = field(default_factory=list)


_active: contextvars.ContextVar[RequestContext | None] = contextvars.ContextVar(
    "pathtrace_request", default=None
)


def current_context() -> RequestContext | None:
    return _active.get()


@contextlib.contextmanager
def use_context(ctx: RequestContext):
    token = _active.set(ctx)
    try:
        yield ctx
    finally:
        _active.reset(token)


def weave(config: AspectConfig, aspects: Mapping[str, object]) -> tuple[BoundAdvice, ...]:
    """Resolve binding advice names against registered aspect instances.

    A binding must reference an aspect that is both declared in the config's
    aspects list and registered in code, and the advice name must be a
    callable attribute of that aspect.
    """
    declared = set(config.aspects)
    bound = []
    for binding in config.bindings:
        if binding.aspect not in declared:
            raise UnknownAdviceError(
                f"aspect {binding.aspect!r} is not declared in the config's aspects list"
            )
        aspect = aspects.get(binding.aspect)
        if aspect is None:
            raise UnknownAdviceError(f"aspect {binding.aspect!r} is not registered")
        body = getattr(aspect, binding.advice, None)
        if not callable(body):
            raise UnknownAdviceError(
                f"aspect {binding.aspect!r} has no advice named {binding.advice!r}"
            )
        bound.append(BoundAdvice(binding, body))
    return tuple(bound)


class Invocation:
    """A reified interceptable call moving through its advice chain."""

    def __init__(
        self,
        jp: JoinPointId,
        arguments: tuple,
        target: object | None,
        location: SourceLocation | None,
        request_ctx: RequestContext,
        chain: tuple[BoundAdvice, ...],
        original: Callable[[], Any],
    ):
        self.jp = jp
        self.arguments = arguments
        self.target = target
        self.location = location
        self.request_ctx = request_ctx
        self._chain = chain
        self._original = original
        self._position = -1
        self._consumed: set[int] = set()
        self._original_attempted = False
        self._original_result: Any = None

    @property
    def chain_position(self) -> int:
        return self._position

    def invoke_next(self) -> Any:
        nxt = self._position + 1
        if nxt in self._consumed:
            raise AdviceProtocolViolation(
                f"{self._frame_name(self._position)} called invoke_next() twice "
                f"at {self.jp.type_path}.{self.jp.method}"
            )
        self._consumed.add(nxt)
        prev = self._position
        self._position = nxt
        try:
            if nxt < len(self._chain):
                entry = self._chain[nxt]
                result = entry.body(self)
                if nxt + 1 not in self._consumed:
                    raise AdviceProtocolViolation(
                        f"advice {entry.binding.advice!r} of {entry.binding.aspect} "
                        f"returned without calling invoke_next()"
                    )
                return result
            self._original_attempted = True
            self._original_result = self._original()
            return self._original_result
        finally:
            self._position = prev

    def run_original_once(self) -> Any:
        if not self._original_attempted:
            self._original_attempted = True
            self._original_result = self._original()
        return self._original_result

    def _frame_name(self, position: int) -> str:
        if position < 0:
            return "dispatcher"
        entry = self._chain[position]
        return f"advice {entry.binding.advice!r} of {entry.binding.aspect}"


def dispatch(
    jp: JoinPointId,
    original: Callable[[], Any],
    *,
    args: tuple = (),
    target: object | None = None,
    location: SourceLocation | None = None,
) -> Any:
    """Run the operation behind a join point, wrapped by any matching advices.

    On an advice protocol violation the request is not failed: the violation
    is recorded on the context and the original operation still runs exactly
    once, its result propagating where recoverable.
    """
    if len(args) != jp.arity:
        raise ValueError(f"join point {jp} dispatched with {len(args)} argument(s)")
    ctx = _active.get()
    if ctx is None or not ctx.collector.enabled:
        return original()
    chain = tuple(b for b in ctx.bound if matches(b.binding.pointcut, jp))
    if not chain:
        return original()
    inv = Invocation(jp, tuple(args), target, location, ctx, chain, original)
    try:
        return inv.invoke_next()
    except AdviceProtocolViolation as exc:
        ctx.violations.append(ViolationNote(jp, str(exc)))
        return inv.run_original_once()
