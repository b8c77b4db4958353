"""The six-phase request lifecycle with path forking.

An initial GET builds a view and renders it (phases 1 and 6). A POST runs
apply-request-values and validation; failures jump straight to render,
success continues through model update, navigation, and render. An AJAX
POST additionally replaces the full-page render with the handler chain
producing a partial update for one component.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ajax import DefaultAjaxHandler, ParamInterceptor, SpecialAjaxHandler
from .app import Application, UnknownViewError
from .components import (
    ComponentNode,
    IdAllocator,
    create_component,
    render_component,
    set_attribute,
)
from .convert import CONVERTERS
from .interception import RequestContext, dispatch, use_context
from .model import expression_path
from .pointcuts import JoinPointId
from .provenance import MetadataCollector, encode_page, find_orphans
from .sessions import Session, SessionStore
from .template import TagNode, TemplateDocument, TextRun
from .validate import RequiredValidator, ValidationFailure

MODEL_UNIT = "pathtrace.model.ModelBag"


class LifecycleError(Exception):
    pass


class MalformedAjaxError(LifecycleError):
    pass


class UnknownRenderTargetError(LifecycleError):
    def __init__(self, component_id: str):
        super().__init__(f"no component {component_id!r} in the current view")
        self.component_id = component_id


@dataclass(frozen=True)
class RequestEnvelope:
    method: str
    path: str
    params: dict[str, list[str]] = field(default_factory=dict)
    ajax: bool = False
    session_id: str | None = None
    request_id: str = "r0"

    def __post_init__(self):
        if self.method not in ("GET", "POST"):
            raise ValueError(f"unsupported method {self.method!r}")
        if self.ajax and self.method != "POST":
            raise ValueError("ajax requests must be POSTs")

    def first(self, name: str) -> str | None:
        values = self.params.get(name)
        return values[0] if values else None


@dataclass
class Response:
    status: int
    body: str
    headers: dict[str, str] = field(default_factory=dict)
    content_type: str = "text/html; charset=utf-8"


def view_from_path(path: str) -> str:
    name = path
    if name.startswith("/pages/"):
        name = name[len("/pages/"):]
    name = name.strip("/")
    if not name or "/" in name or ".." in name:
        raise UnknownViewError(path)
    if not name.endswith(".xhtml"):
        name += ".xhtml"
    return name


@dataclass
class RequestRun:
    """Mutable state threaded through the phases of one request."""

    app: Application
    env: RequestEnvelope
    store: SessionStore
    session: Session
    ctx: RequestContext
    view_id: str
    doc: TemplateDocument
    roots: list[ComponentNode] = field(default_factory=list)
    restored: bool = False
    recovered: bool = False
    failures: list[ValidationFailure] = field(default_factory=list)
    outcome: str = ""
    navigate_to: str | None = None
    render_view_id: str = ""
    render_doc: TemplateDocument | None = None
    render_roots: list[ComponentNode] = field(default_factory=list)
    body: str = ""
    partial_ids: list[str] | None = None
    label: str = ""
    note: str | None = None

    def all_nodes(self):
        for root in self.roots:
            yield from root.walk()

    def input_nodes(self):
        for node in self.all_nodes():
            if self._entry(node).input:
                yield node

    def find_by_tag(self, local_tag: str) -> ComponentNode | None:
        for node in self.all_nodes():
            if node.tag.split(":", 1)[-1] == local_tag:
                return node
        return None

    def rendered_ids(self) -> list[str]:
        if self.partial_ids is not None:
            return self.partial_ids
        out: list[str] = []
        for root in self.render_roots:
            out.extend(node.id for node in root.walk())
        return out

    def _entry(self, node: ComponentNode):
        return self.app.registry.lookup(node.tag.split(":", 1)[-1])


def build_view(app: Application, doc: TemplateDocument) -> list[ComponentNode]:
    ids = IdAllocator()
    return [
        create_component(app.registry, item, ids)
        for item in doc.root
        if isinstance(item, TagNode)
    ]


def _resolve_values(run: RequestRun, root: ComponentNode) -> None:
    """Pull bound values from the model right before encoding.

    Components that carry a submitted value this request, or failed
    validation, keep what they have so the user's input is what renders.
    """
    model = run.session.model
    for node in root.walk():
        if node.binding and node.valid and node.submitted is None:
            path = expression_path(node.binding)
            jp = JoinPointId(MODEL_UNIT, "get", 1)
            resolved = dispatch(
                jp, lambda p=path: model.get(p), args=(path,),
                target=node, location=node.location,
            )
            set_attribute(node, "value", resolved)


def _render_page(run: RequestRun) -> str:
    parts: list[str] = []
    roots = iter(run.render_roots)
    assert run.render_doc is not None
    for item in run.render_doc.root:
        if isinstance(item, TextRun):
            parts.append(item.text)
        else:
            root = next(roots)
            _resolve_values(run, root)
            parts.append(render_component(root, run.app.registry))
    return "".join(parts)


class RestoreViewPhase:
    number = 1
    unit = "pathtrace.lifecycle.RestoreViewPhase"

    def execute(self, run: RequestRun) -> None:
        restored = run.store.restore_view(run.session, run.view_id)
        if restored is not None:
            run.roots = restored
            run.restored = True
            for node in run.all_nodes():
                node.submitted = None
                node.valid = True
                jp = JoinPointId(node.type_path, "restoreState", 1)
                dispatch(jp, lambda n=node: n, args=(node,),
                         target=node, location=node.location)
        else:
            run.roots = build_view(run.app, run.doc)
            run.restored = False
        run.render_view_id = run.view_id
        run.render_doc = run.doc
        run.render_roots = run.roots


class ApplyRequestValuesPhase:
    number = 2
    unit = "pathtrace.lifecycle.ApplyRequestValuesPhase"

    def execute(self, run: RequestRun) -> None:
        for node in run.input_nodes():
            node.submitted = None
            value = run.env.first(node.id)
            if value is not None:
                set_attribute(node, "value", value)
                node.submitted = value


class ProcessValidationsPhase:
    number = 3
    unit = "pathtrace.lifecycle.ProcessValidationsPhase"

    required = RequiredValidator()

    def execute(self, run: RequestRun) -> None:
        failures: list[ValidationFailure] = []
        for node in run.input_nodes():
            if node.attributes.get("required") == "true":
                jp = JoinPointId(self.required.unit, "validate", 1)
                failure = dispatch(
                    jp, lambda n=node: self.required.validate(n), args=(node,),
                    target=node, location=node.location,
                )
                if failure is not None:
                    failures.append(failure)
                    continue
            converter = CONVERTERS.get(node.attributes.get("converter", ""))
            if converter is not None and node.value != "":
                jp = JoinPointId(converter.unit, "convert", 1)
                failure = dispatch(
                    jp, lambda n=node, c=converter: c.convert(n), args=(node.value,),
                    target=node, location=node.location,
                )
                if failure is not None:
                    failures.append(failure)
        run.failures = failures
        messages = run.find_by_tag("messages")
        if messages is not None:
            text = "\n".join(f.message for f in failures)
            if text or messages.value:
                set_attribute(messages, "value", text)


class UpdateModelValuesPhase:
    number = 4
    unit = "pathtrace.lifecycle.UpdateModelValuesPhase"

    def execute(self, run: RequestRun) -> None:
        model = run.session.model
        for node in run.input_nodes():
            if node.binding and node.valid:
                path = expression_path(node.binding)
                jp = JoinPointId(MODEL_UNIT, "set", 2)
                dispatch(
                    jp, lambda p=path, n=node: model.set(p, n.value),
                    args=(path, node.value), target=node, location=node.location,
                )


class InvokeApplicationPhase:
    number = 5
    unit = "pathtrace.lifecycle.InvokeApplicationPhase"

    def execute(self, run: RequestRun) -> None:
        outcome = ""
        for node in run.all_nodes():
            if "action" in node.attributes and node.id in run.env.params:
                outcome = node.attributes["action"]
                break
        run.outcome = outcome
        nav = run.app.navigation
        jp = JoinPointId(nav.unit, "handleNavigation", 1)
        target = dispatch(
            jp, lambda: nav.handle_navigation(run.view_id, outcome), args=(outcome,)
        )
        if target:
            run.navigate_to = target


class RenderResponsePhase:
    number = 6
    unit = "pathtrace.lifecycle.RenderResponsePhase"

    interceptor = ParamInterceptor()
    special = SpecialAjaxHandler()
    default = DefaultAjaxHandler()

    def execute(self, run: RequestRun) -> None:
        if run.navigate_to:
            run.render_view_id = run.navigate_to
            run.render_doc = run.app.template(run.navigate_to)
            run.render_roots = build_view(run.app, run.render_doc)
        if run.env.ajax and not run.recovered:
            self._partial(run)
        else:
            run.body = _render_page(run)
            run.partial_ids = None

    def _partial(self, run: RequestRun) -> None:
        render_id = run.env.first("render") or ""
        target = None
        for root in run.render_roots:
            target = root.find(render_id)
            if target is not None:
                break
        if target is None:
            raise UnknownRenderTargetError(render_id)
        params = run.env.params
        jp = JoinPointId(self.interceptor.unit, "intercept", 1)
        is_special = dispatch(
            jp, lambda: self.interceptor.intercept(params), args=(params,),
            target=target, location=target.location,
        )
        _resolve_values(run, target)

        def encode(node: ComponentNode) -> str:
            return render_component(node, run.app.registry)

        handler = self.special if is_special else self.default
        jp = JoinPointId(handler.unit, "handle", 1)
        run.body = dispatch(
            jp, lambda: handler.handle(target, encode), args=(target.id,),
            target=target, location=target.location,
        )
        run.partial_ids = [node.id for node in target.walk()]
        run.label = "AJAX-special" if is_special else "AJAX-default"


_RESTORE = RestoreViewPhase()
_APPLY = ApplyRequestValuesPhase()
_VALIDATE = ProcessValidationsPhase()
_UPDATE = UpdateModelValuesPhase()
_INVOKE = InvokeApplicationPhase()
_RENDER = RenderResponsePhase()


def _run_phase(run: RequestRun, phase, note: str | None = None) -> None:
    run.ctx.collector.enter_phase(phase.number, note)
    jp = JoinPointId(phase.unit, "execute", 1)
    dispatch(jp, lambda: phase.execute(run), args=(run.view_id,))


def _drive(run: RequestRun) -> None:
    env = run.env
    recreate = env.ajax and not run.store.has_view(run.session, run.view_id)
    run.recovered = recreate
    _run_phase(run, _RESTORE, note="view-recreated" if recreate else None)
    if env.method == "GET":
        run.label = "GET-restored" if run.restored else "GET-initial"
    elif recreate:
        run.label = "AJAX-view-recreated"
        run.note = "view-recreated"
    else:
        _run_phase(run, _APPLY)
        _run_phase(run, _VALIDATE)
        if run.failures:
            if not env.ajax:
                run.label = "POST-validation-failed"
        else:
            _run_phase(run, _UPDATE)
            _run_phase(run, _INVOKE)
            if not env.ajax:
                run.label = "POST-navigated" if run.navigate_to else "POST-no-navigation"
    _run_phase(run, _RENDER)


def process_request(
    app: Application,
    env: RequestEnvelope,
    store: SessionStore,
    *,
    enabled: bool = True,
) -> tuple[Response, Session]:
    """Process one request end to end; returns the response and its session."""
    view_id = view_from_path(env.path)
    doc = app.template(view_id)
    if env.ajax and not env.first("render"):
        raise MalformedAjaxError("ajax request without a render parameter")
    session, _ = store.get_or_create(env.session_id, app.config.model_seed)
    collector = MetadataCollector(env.request_id, enabled=enabled)
    ctx = RequestContext(env.request_id, session.id, collector, bound=app.bindings)
    run = RequestRun(
        app=app, env=env, store=store, session=session, ctx=ctx,
        view_id=view_id, doc=doc,
    )
    with use_context(ctx):
        _drive(run)
        store.save_view(session, run.render_view_id, run.render_roots, env.request_id)
    headers = {"X-Request-Id": env.request_id, "X-Prov": "on" if enabled else "off"}
    if run.note:
        headers["X-Prov-Note"] = run.note
    if ctx.violations:
        headers["X-Prov-Error"] = ctx.violations[0].message.replace("\n", " ")
    body = run.body
    if enabled:
        collector.path_label = run.label
        records = collector.finalize(session.id, order=run.rendered_ids())
        orphans = set(find_orphans(body, records))
        if orphans:
            headers["X-Prov-Dropped"] = str(len(orphans))
            records = [r for r in records if r.component_id not in orphans]
        body = encode_page(body, records, collector.summary())
    return Response(status=200, body=body, headers=headers), session
