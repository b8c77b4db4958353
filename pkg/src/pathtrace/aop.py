"""Built-in metadata-generating advices.

Each advice follows the same shape: read what it needs from the invocation,
write into the request's collector, then resume the chain exactly once.
Aspect unit paths double as registry keys for aspects.json.
"""

from __future__ import annotations

from .interception import Invocation

COMPONENT_ASPECT = "pathtrace.aop.ComponentAdvice"
TAG_ASPECT = "pathtrace.aop.TagAdvice"
RENDER_ASPECT = "pathtrace.aop.RenderAdvice"
PHASE_ASPECT = "pathtrace.aop.PhaseAdvice"
AJAX_ASPECT = "pathtrace.aop.AjaxAdvice"


def attribute_from_setter(method: str) -> str:
    """setStyleClass -> styleClass (inverse of the setter naming rule)."""
    rest = method[3:] if method.startswith("set") else method
    return rest[:1].lower() + rest[1:]


def _line_of(inv: Invocation) -> int:
    if inv.location is not None:
        return inv.location.line
    node_loc = getattr(inv.target, "location", None)
    return node_loc.line if node_loc is not None else 0


class ComponentAdvice:
    """Observes component state changes: setters, restore, checks, model I/O."""

    unit = COMPONENT_ASPECT

    def setter(self, inv: Invocation):
        collector = inv.request_ctx.collector
        name = attribute_from_setter(inv.jp.method)
        collector.attribute_event(inv.target, name, str(inv.arguments[0]), self.unit, _line_of(inv))
        return inv.invoke_next()

    def restore(self, inv: Invocation):
        inv.request_ctx.collector.server_step(inv.target, inv.jp.type_path, inv.jp.method)
        return inv.invoke_next()

    def check(self, inv: Invocation):
        inv.request_ctx.collector.server_step(inv.target, inv.jp.type_path, inv.jp.method)
        return inv.invoke_next()

    def model(self, inv: Invocation):
        inv.request_ctx.collector.server_step(inv.target, inv.jp.type_path, inv.jp.method)
        return inv.invoke_next()


class TagAdvice:
    """Observes tag-driven component construction."""

    unit = TAG_ASPECT

    def tag(self, inv: Invocation):
        collector = inv.request_ctx.collector
        # Touching the draft here pins tag name and template location even if
        # no later advice fires for this component.
        collector.draft_for(inv.target)
        collector.server_step(inv.target, inv.jp.type_path, inv.jp.method)
        return inv.invoke_next()


class RenderAdvice:
    """Observes renderer encode calls."""

    unit = RENDER_ASPECT

    def render(self, inv: Invocation):
        inv.request_ctx.collector.server_step(inv.target, inv.jp.type_path, inv.jp.method)
        return inv.invoke_next()


class PhaseAdvice:
    """Appends one trace step per lifecycle phase entry."""

    unit = PHASE_ASPECT

    def phase(self, inv: Invocation):
        inv.request_ctx.collector.trace_step(inv.jp.type_path, inv.jp.method)
        return inv.invoke_next()


class AjaxAdvice:
    """Records which handler-chain units ran for a partial update."""

    unit = AJAX_ASPECT

    def ajax(self, inv: Invocation):
        if inv.target is not None:
            inv.request_ctx.collector.server_step(inv.target, inv.jp.type_path, inv.jp.method)
        return inv.invoke_next()


def default_aspects() -> dict[str, object]:
    instances = (ComponentAdvice(), TagAdvice(), RenderAdvice(), PhaseAdvice(), AjaxAdvice())
    return {aspect.unit: aspect for aspect in instances}
