"""Per-component metadata records and the response-embedding codec.

Records travel inside the page as hidden inputs: one ``prov-meta`` marker
immediately before each described element, plus a single ``prov-summary``
marker near the end of the body. Payloads are canonical JSON (schema
``prov/1``) in URL-safe base64; stripping all markers restores the
uninstrumented page byte for byte.
"""

from __future__ import annotations

import base64
import binascii
import json
import logging
import re
from dataclasses import dataclass, field

from .template import SourceLocation

log = logging.getLogger(__name__)

SCHEMA = "prov/1"

_META_FMT = '<input type="hidden" class="prov-meta" data-for="{cid}" value="{payload}"/>'
_SUMMARY_FMT = '<input type="hidden" class="prov-summary" value="{payload}"/>'
_MARKER_RE = re.compile(
    r'<input type="hidden" class="prov-(meta|summary)"'
    r'(?: data-for="([^"]*)")? value="([^"]*)"/>'
)
# Strip is deliberately wider than the emit format: any input carrying one of
# the marker classes goes, including look-alikes authored by the page itself.
_STRIP_RE = re.compile(r'<input\b[^<>]*class="prov-(?:meta|summary)"[^<>]*/?>')


@dataclass(frozen=True)
class AttributeEvent:
    """One observed attribute write: who set what, and from which line."""

    name: str
    value: str
    by: str
    line: int


@dataclass(frozen=True)
class ServerPathEntry:
    unit: str
    method: str
    phase: int


@dataclass(frozen=True)
class ProvenanceRecord:
    component_id: str
    type_path: str
    tag: str | None
    source: SourceLocation | None
    attribute_events: tuple[AttributeEvent, ...]
    server_path: tuple[ServerPathEntry, ...]
    request_id: str
    session_id: str | None = None


@dataclass(frozen=True)
class PhaseSummary:
    request_id: str
    phases_executed: tuple[int, ...]
    path_label: str


@dataclass(frozen=True)
class PhaseStep:
    phase: int
    unit: str
    method: str
    location: SourceLocation | None = None
    note: str | None = None


@dataclass
class PhaseTrace:
    steps: list[PhaseStep] = field(default_factory=list)


@dataclass(frozen=True)
class DecodeIssue:
    """A marker that could not be decoded; position is document order."""

    index: int
    component_id: str | None
    reason: str


@dataclass
class DecodedPage:
    records: list[ProvenanceRecord]
    summary: PhaseSummary | None
    errors: list[DecodeIssue]


def canonical_json(data) -> str:
    return json.dumps(data, ensure_ascii=False, separators=(",", ":"))


def record_to_dict(record: ProvenanceRecord) -> dict:
    out: dict = {"schema": SCHEMA, "component_id": record.component_id}
    out["type_path"] = record.type_path
    if record.tag is not None:
        out["tag"] = record.tag
    if record.source is not None:
        out["source"] = {
            "file": record.source.file,
            "line": record.source.line,
            "column": record.source.column,
        }
    out["attribute_events"] = [
        {"name": e.name, "value": e.value, "by": e.by, "line": e.line}
        for e in record.attribute_events
    ]
    out["server_path"] = [
        {"unit": s.unit, "method": s.method, "phase": s.phase}
        for s in record.server_path
    ]
    out["request_id"] = record.request_id
    if record.session_id is not None:
        out["session_id"] = record.session_id
    return out


def summary_to_dict(summary: PhaseSummary) -> dict:
    return {
        "schema": SCHEMA,
        "request_id": summary.request_id,
        "phases_executed": list(summary.phases_executed),
        "path_label": summary.path_label,
    }


class _BadPayload(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _require(data: dict, key: str, kinds) -> object:
    if key not in data or not isinstance(data[key], kinds):
        raise _BadPayload(f"bad-field:{key}")
    return data[key]


def _source_from_dict(data: dict | None) -> SourceLocation | None:
    if data is None:
        return None
    if not isinstance(data, dict):
        raise _BadPayload("bad-field:source")
    try:
        return SourceLocation(data["file"], data["line"], data["column"])
    except (KeyError, TypeError, ValueError) as exc:
        raise _BadPayload("bad-field:source") from exc


def record_from_dict(data: dict) -> ProvenanceRecord:
    if data.get("schema") != SCHEMA:
        raise _BadPayload("bad-schema")
    events = []
    for raw in _require(data, "attribute_events", list):
        if not isinstance(raw, dict):
            raise _BadPayload("bad-field:attribute_events")
        try:
            event = AttributeEvent(raw["name"], raw["value"], raw["by"], raw["line"])
        except KeyError as exc:
            raise _BadPayload("bad-field:attribute_events") from exc
        if not isinstance(event.line, int) or isinstance(event.line, bool) or event.line < 0:
            raise _BadPayload("bad-field:attribute_events")
        events.append(event)
    path = []
    for raw in _require(data, "server_path", list):
        if not isinstance(raw, dict):
            raise _BadPayload("bad-field:server_path")
        try:
            entry = ServerPathEntry(raw["unit"], raw["method"], raw["phase"])
        except KeyError as exc:
            raise _BadPayload("bad-field:server_path") from exc
        # Lifecycle phases are serialized as bare ints, one of 1 through 6.
        if not isinstance(entry.phase, int) or isinstance(entry.phase, bool) \
                or not 1 <= entry.phase <= 6:
            raise _BadPayload("bad-field:server_path")
        path.append(entry)
    return ProvenanceRecord(
        component_id=str(_require(data, "component_id", str)),
        type_path=str(_require(data, "type_path", str)),
        tag=data.get("tag"),
        source=_source_from_dict(data.get("source")),
        attribute_events=tuple(events),
        server_path=tuple(path),
        request_id=str(_require(data, "request_id", str)),
        session_id=data.get("session_id"),
    )


def summary_from_dict(data: dict) -> PhaseSummary:
    if data.get("schema") != SCHEMA:
        raise _BadPayload("bad-schema")
    phases = _require(data, "phases_executed", list)
    if not all(isinstance(p, int) for p in phases):
        raise _BadPayload("bad-field:phases_executed")
    return PhaseSummary(
        request_id=str(_require(data, "request_id", str)),
        phases_executed=tuple(phases),
        path_label=str(_require(data, "path_label", str)),
    )


def encode_payload(data: dict) -> str:
    return base64.urlsafe_b64encode(canonical_json(data).encode("utf-8")).decode("ascii")


_URLSAFE_TO_STD = bytes.maketrans(b"-_", b"+/")


def decode_payload(text: str) -> dict:
    try:
        # validate=True: stray bytes must fail decoding, not be discarded.
        raw = base64.b64decode(
            text.encode("ascii").translate(_URLSAFE_TO_STD), validate=True
        )
    except (binascii.Error, ValueError, UnicodeEncodeError) as exc:
        raise _BadPayload("bad-base64") from exc
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise _BadPayload("bad-json") from exc
    if not isinstance(data, dict):
        raise _BadPayload("bad-json")
    return data


def _element_start(html: str, component_id: str) -> int | None:
    pattern = re.compile(r'<[A-Za-z][^<>]*\sid="' + re.escape(component_id) + r'"[^<>]*>')
    m = pattern.search(html)
    return None if m is None else m.start()


def find_orphans(html: str, records: list[ProvenanceRecord]) -> list[str]:
    """Ids of records whose element is absent from the page."""
    return [r.component_id for r in records if _element_start(html, r.component_id) is None]


def encode_page(html: str, records: list[ProvenanceRecord], summary: PhaseSummary) -> str:
    """Insert one meta marker per record plus the summary marker.

    Records whose component id has no matching element are dropped with a
    warning; callers that care count them first via find_orphans.
    """
    insertions: list[tuple[int, str]] = []
    for record in records:
        start = _element_start(html, record.component_id)
        if start is None:
            log.warning("dropping record for %r: element not found", record.component_id)
            continue
        payload = encode_payload(record_to_dict(record))
        insertions.append((start, _META_FMT.format(cid=record.component_id, payload=payload)))
    body_at = html.rfind("</body>")
    if body_at < 0:
        body_at = len(html)
    insertions.append(
        (body_at, _SUMMARY_FMT.format(payload=encode_payload(summary_to_dict(summary))))
    )
    insertions.sort(key=lambda pair: pair[0])
    parts = []
    prev = 0
    for pos, marker in insertions:
        parts.append(html[prev:pos])
        parts.append(marker)
        prev = pos
    parts.append(html[prev:])
    return "".join(parts)


def strip(html: str) -> str:
    """Remove every marker-shaped input, restoring the plain page."""
    return _STRIP_RE.sub("", html)


def decode_page(html: str) -> DecodedPage:
    """Decode all markers in document order; failures isolate per marker."""
    records: list[ProvenanceRecord] = []
    summary: PhaseSummary | None = None
    errors: list[DecodeIssue] = []
    for index, m in enumerate(_MARKER_RE.finditer(html)):
        kind, data_for, payload = m.group(1), m.group(2), m.group(3)
        try:
            data = decode_payload(payload)
            if kind == "meta":
                records.append(record_from_dict(data))
            else:
                summary = summary_from_dict(data)
        except _BadPayload as exc:
            errors.append(DecodeIssue(index, data_for, exc.reason))
    return DecodedPage(records=records, summary=summary, errors=errors)


class MetadataCollector:
    """Request-scoped sink the built-in advices write into.

    Drafts are keyed by component id; the lifecycle engine drives phase
    bookkeeping (phases list, current phase) so the summary stays truthful
    even when no phase advice is bound.
    """

    def __init__(self, request_id: str, enabled: bool = True):
        self.request_id = request_id
        self.enabled = enabled
        self.trace = PhaseTrace()
        self.phases: list[int] = []
        self.current_phase: int = 0
        self.current_note: str | None = None
        self.path_label = ""
        self._drafts: dict[str, _Draft] = {}

    def enter_phase(self, number: int, note: str | None = None) -> None:
        self.current_phase = number
        self.current_note = note
        self.phases.append(number)

    def draft_for(self, node) -> "_Draft":
        draft = self._drafts.get(node.id)
        if draft is None:
            draft = _Draft(
                component_id=node.id,
                type_path=node.type_path,
                tag=getattr(node, "tag", None),
                source=getattr(node, "location", None),
            )
            self._drafts[node.id] = draft
        return draft

    def attribute_event(self, node, name: str, value: str, by: str, line: int) -> None:
        self.draft_for(node).attribute_events.append(AttributeEvent(name, value, by, line))

    def server_step(self, node, unit: str, method: str, phase: int | None = None) -> None:
        entry = ServerPathEntry(unit, method, self.current_phase if phase is None else phase)
        self.draft_for(node).server_path.append(entry)

    def trace_step(self, unit: str, method: str, *, location: SourceLocation | None = None,
                   note: str | None = None) -> None:
        self.trace.steps.append(
            PhaseStep(self.current_phase, unit, method, location,
                      self.current_note if note is None else note)
        )

    def event_count(self) -> int:
        return sum(
            len(d.attribute_events) + len(d.server_path) for d in self._drafts.values()
        ) + len(self.trace.steps)

    def summary(self) -> PhaseSummary:
        return PhaseSummary(self.request_id, tuple(self.phases), self.path_label)

    def finalize(self, session_id: str | None, order: list[str] | None = None
                 ) -> list[ProvenanceRecord]:
        """Freeze drafts into records; order lists component ids to keep."""
        ids = list(self._drafts) if order is None else [i for i in order if i in self._drafts]
        return [self._drafts[i].freeze(self.request_id, session_id) for i in ids]


@dataclass
class _Draft:
    component_id: str
    type_path: str
    tag: str | None
    source: SourceLocation | None
    attribute_events: list[AttributeEvent] = field(default_factory=list)
    server_path: list[ServerPathEntry] = field(default_factory=list)

    def freeze(self, request_id: str, session_id: str | None) -> ProvenanceRecord:
        return ProvenanceRecord(
            component_id=self.component_id,
            type_path=self.type_path,
            tag=self.tag,
            source=self.source,
            attribute_events=tuple(self.attribute_events),
            server_path=tuple(self.server_path),
            request_id=request_id,
            session_id=session_id,
        )
