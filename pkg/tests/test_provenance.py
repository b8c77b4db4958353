from __future__ import annotations

import json

from hypothesis import given, settings
from hypothesis import strategies as st

from pathtrace.provenance import (
    AttributeEvent,
    MetadataCollector,
    PhaseSummary,
    ProvenanceRecord,
    SCHEMA,
    ServerPathEntry,
    canonical_json,
    decode_page,
    decode_payload,
    encode_page,
    encode_payload,
    find_orphans,
    record_from_dict,
    record_to_dict,
    strip,
    summary_from_dict,
    summary_to_dict,
)
from pathtrace.template import SourceLocation

ids = st.from_regex(r"[A-Za-z][A-Za-z0-9_-]{0,8}", fullmatch=True)
units = st.sampled_from((
    "demo.component.html.InputText",
    "demo.render.html.CalendarRenderer",
    "pathtrace.model.ModelBag",
    "pathtrace.validate.RequiredValidator",
))
free_text = st.text(max_size=24)

events = st.builds(
    AttributeEvent,
    name=st.sampled_from(("id", "value", "styleClass", "required")),
    value=free_text,
    by=units,
    line=st.integers(min_value=0, max_value=400),
)
path_entries = st.builds(
    ServerPathEntry,
    unit=units,
    method=st.sampled_from(("setValue", "encode", "validate", "get", "set")),
    phase=st.integers(min_value=1, max_value=6),
)
locations = st.builds(
    SourceLocation,
    file=st.sampled_from(("form.xhtml", "calendar.xhtml")),
    line=st.integers(min_value=1, max_value=300),
    column=st.integers(min_value=1, max_value=120),
)
records = st.builds(
    ProvenanceRecord,
    component_id=ids,
    type_path=units,
    tag=st.none() | st.sampled_from(("ui:inputText", "ui:panel")),
    source=st.none() | locations,
    attribute_events=st.tuples() | st.lists(events, max_size=4).map(tuple),
    server_path=st.lists(path_entries, max_size=5).map(tuple),
    request_id=st.from_regex(r"r[0-9]{1,6}", fullmatch=True),
    session_id=st.none() | st.from_regex(r"[0-9a-f]{16}", fullmatch=True),
)
summaries = st.builds(
    PhaseSummary,
    request_id=st.from_regex(r"r[0-9]{1,6}", fullmatch=True),
    phases_executed=st.sampled_from(((1, 6), (1, 2, 3, 6), (1, 2, 3, 4, 5, 6))),
    path_label=st.sampled_from(("GET-initial", "POST-navigated", "AJAX-special")),
)


def page_for(record_list: list[ProvenanceRecord]) -> str:
    elements = "\n".join(
        f'<div id="{r.component_id}">x</div>' for r in record_list
    )
    return f"<html><body>\n{elements}\n</body></html>"


def distinct_ids(record_list: list[ProvenanceRecord]) -> bool:
    seen = {r.component_id for r in record_list}
    return len(seen) == len(record_list)


def test_record_dict_key_order_is_stable():
    record = ProvenanceRecord(
        component_id="n", type_path="demo.component.html.InputText",
        tag="ui:inputText", source=SourceLocation("form.xhtml", 7, 3),
        attribute_events=(AttributeEvent("value", "Ada", "demo.component.html.InputText", 7),),
        server_path=(ServerPathEntry("pathtrace.model.ModelBag", "get", 6),),
        request_id="r000001", session_id="0123456789abcdef",
    )
    data = record_to_dict(record)
    assert list(data) == [
        "schema", "component_id", "type_path", "tag", "source",
        "attribute_events", "server_path", "request_id", "session_id",
    ]
    assert data["schema"] == SCHEMA
    assert list(data["source"]) == ["file", "line", "column"]
    assert list(data["attribute_events"][0]) == ["name", "value", "by", "line"]
    assert list(data["server_path"][0]) == ["unit", "method", "phase"]
    assert isinstance(data["server_path"][0]["phase"], int)


def test_optional_fields_are_omitted_not_nulled():
    record = ProvenanceRecord(
        component_id="n", type_path="t.X", tag=None, source=None,
        attribute_events=(), server_path=(), request_id="r1", session_id=None,
    )
    data = record_to_dict(record)
    assert "tag" not in data and "source" not in data and "session_id" not in data


def test_summary_dict_key_order():
    data = summary_to_dict(PhaseSummary("r1", (1, 6), "GET-initial"))
    assert list(data) == ["schema", "request_id", "phases_executed", "path_label"]


def test_canonical_json_is_compact_and_keeps_unicode():
    text = canonical_json({"a": ["é", 1], "b": "x"})
    assert text == '{"a":["é",1],"b":"x"}'


@given(record=records)
def test_payload_round_trip(record):
    assert record_from_dict(decode_payload(encode_payload(record_to_dict(record)))) == record


@given(summary=summaries)
def test_summary_round_trip(summary):
    assert summary_from_dict(decode_payload(encode_payload(summary_to_dict(summary)))) == summary


@given(record=records)
def test_payload_is_attribute_safe(record):
    payload = encode_payload(record_to_dict(record))
    assert all(c.isalnum() or c in "-_=" for c in payload)


@settings(max_examples=60, deadline=None)
@given(record_list=st.lists(records, max_size=4).filter(distinct_ids),
       summary=summaries)
def test_page_round_trip(record_list, summary):
    html = page_for(record_list)
    encoded = encode_page(html, record_list, summary)
    decoded = decode_page(encoded)
    assert decoded.records == record_list
    assert decoded.summary == summary
    assert decoded.errors == []
    assert strip(encoded) == html


@settings(max_examples=60, deadline=None)
@given(record_list=st.lists(records, max_size=4).filter(distinct_ids),
       summary=summaries)
def test_encoded_size_is_page_plus_markers(record_list, summary):
    html = page_for(record_list)
    encoded = encode_page(html, record_list, summary)
    marker_text = len(encoded) - len(html)
    payloads = [encode_payload(record_to_dict(r)) for r in record_list]
    payloads.append(encode_payload(summary_to_dict(summary)))
    frame = '<input type="hidden" class="prov-meta" data-for="" value=""/>'
    frame_sizes = len(record_list) * len(frame) + len(
        '<input type="hidden" class="prov-summary" value=""/>'
    )
    assert marker_text == frame_sizes + sum(map(len, payloads)) + sum(
        len(r.component_id) for r in record_list
    )


def test_meta_marker_sits_before_its_element():
    record = ProvenanceRecord("n", "t.X", None, None, (), (), "r1")
    html = '<body><p>x</p><input type="text" id="n" value="A"/></body>'
    encoded = encode_page(html, [record], PhaseSummary("r1", (1, 6), "GET-initial"))
    marker_at = encoded.index('class="prov-meta"')
    element_at = encoded.index('<input type="text" id="n"')
    between = encoded[marker_at:element_at]
    assert 'data-for="n"' in between
    assert between.endswith("/>")


def test_summary_marker_precedes_body_close_once():
    html = "<html><body><p>x</p></body></html>"
    encoded = encode_page(html, [], PhaseSummary("r1", (1, 6), "GET-initial"))
    assert encoded.count('class="prov-summary"') == 1
    tail = encoded[encoded.index('class="prov-summary"'):]
    assert tail.split("/>", 1)[1] == "</body></html>"


def test_summary_appended_when_no_body_close():
    html = "<p>fragment</p>"
    encoded = encode_page(html, [], PhaseSummary("r1", (1, 6), "GET-initial"))
    assert encoded.startswith(html)
    assert 'class="prov-summary"' in encoded


def test_orphan_records_are_detected_and_dropped():
    present = ProvenanceRecord("here", "t.X", None, None, (), (), "r1")
    missing = ProvenanceRecord("gone", "t.X", None, None, (), (), "r1")
    html = '<body><div id="here">x</div></body>'
    assert find_orphans(html, [present, missing]) == ["gone"]
    encoded = encode_page(html, [present, missing],
                          PhaseSummary("r1", (1, 6), "GET-initial"))
    assert 'data-for="here"' in encoded
    assert 'data-for="gone"' not in encoded


def test_markers_decode_in_document_order():
    record_list = [
        ProvenanceRecord(f"c{i}", "t.X", None, None, (), (), "r1") for i in range(4)
    ]
    html = page_for(record_list)
    encoded = encode_page(html, list(reversed(record_list)),
                          PhaseSummary("r1", (1, 6), "GET-initial"))
    decoded = decode_page(encoded)
    assert [r.component_id for r in decoded.records] == ["c0", "c1", "c2", "c3"]


def test_corrupt_marker_is_isolated():
    record_list = [
        ProvenanceRecord(f"c{i}", "t.X", None, None, (), (), "r1") for i in range(3)
    ]
    summary = PhaseSummary("r1", (1, 6), "GET-initial")
    encoded = encode_page(page_for(record_list), record_list, summary)
    target = 'data-for="c1" value="'
    at = encoded.index(target) + len(target)
    corrupted = encoded[:at] + "!!!" + encoded[at:]
    decoded = decode_page(corrupted)
    assert [r.component_id for r in decoded.records] == ["c0", "c2"]
    assert decoded.summary == summary
    assert [(e.index, e.component_id, e.reason) for e in decoded.errors] == [
        (1, "c1", "bad-base64")
    ]


def test_bad_json_and_bad_schema_reasons():
    import base64

    def marker(payload: str) -> str:
        return f'<input type="hidden" class="prov-meta" data-for="x" value="{payload}"/>'

    not_json = base64.urlsafe_b64encode(b"nope").decode()
    wrong_schema = encode_payload({"schema": "prov/2"})
    not_object = base64.urlsafe_b64encode(b"[1]").decode()
    html = f'<body>{marker(not_json)}{marker(wrong_schema)}{marker(not_object)}</body>'
    decoded = decode_page(html)
    assert [e.reason for e in decoded.errors] == ["bad-json", "bad-schema", "bad-json"]


def test_non_integer_phase_rejected():
    record = ProvenanceRecord(
        "n", "t.X", None, None, (),
        (ServerPathEntry("u.X", "m", 6),), "r1",
    )
    data = record_to_dict(record)
    data["server_path"][0]["phase"] = "6"
    try:
        record_from_dict(data)
    except Exception as exc:
        assert getattr(exc, "reason", None) == "bad-field:server_path"
    else:
        raise AssertionError("string phase accepted")
    data["server_path"][0]["phase"] = 7
    try:
        record_from_dict(data)
    except Exception as exc:
        assert getattr(exc, "reason", None) == "bad-field:server_path"
    else:
        raise AssertionError("out-of-range phase accepted")


def test_last_summary_wins():
    one = encode_payload(summary_to_dict(PhaseSummary("r1", (1, 6), "GET-initial")))
    two = encode_payload(summary_to_dict(PhaseSummary("r2", (1, 2, 3, 6), "POST-validation-failed")))
    html = (f'<body><input type="hidden" class="prov-summary" value="{one}"/>'
            f'<input type="hidden" class="prov-summary" value="{two}"/></body>')
    assert decode_page(html).summary.request_id == "r2"


def test_strip_removes_only_marker_inputs():
    html = ('<body><input type="text" id="n" value="A"/>'
            '<input type="hidden" class="prov-meta" data-for="n" value="zz"/>'
            '<input type="hidden" name="other"/>'
            '<input type="hidden" class="prov-summary" value="zz"/></body>')
    assert strip(html) == ('<body><input type="text" id="n" value="A"/>'
                           '<input type="hidden" name="other"/></body>')


def test_strip_is_idempotent_on_plain_pages(generated_pages):
    for _, text in generated_pages[:20]:
        assert strip(text) == text


class FakeNode:
    def __init__(self, id: str, type_path: str = "demo.component.html.InputText",
                 tag: str | None = "ui:inputText", location=None):
        self.id = id
        self.type_path = type_path
        self.tag = tag
        self.location = location


def test_collector_builds_one_record_per_component():
    collector = MetadataCollector("r9")
    collector.enter_phase(1)
    node = FakeNode("n", location=SourceLocation("form.xhtml", 7, 3))
    collector.draft_for(node)
    collector.attribute_event(node, "value", "Ada", "demo.component.html.InputText", 7)
    collector.enter_phase(6)
    collector.server_step(node, "demo.render.html.InputTextRenderer", "encode")
    collector.server_step(node, "pathtrace.model.ModelBag", "get", phase=6)
    [record] = collector.finalize("0123456789abcdef")
    assert record.component_id == "n"
    assert record.source == SourceLocation("form.xhtml", 7, 3)
    assert [e.name for e in record.attribute_events] == ["value"]
    assert [(s.unit, s.phase) for s in record.server_path] == [
        ("demo.render.html.InputTextRenderer", 6),
        ("pathtrace.model.ModelBag", 6),
    ]
    assert record.request_id == "r9"
    assert record.session_id == "0123456789abcdef"


def test_collector_event_count_and_summary():
    collector = MetadataCollector("r9")
    collector.enter_phase(1, note="view-recreated")
    node = FakeNode("n")
    collector.attribute_event(node, "id", "n", "demo.taglib.InputTextTag", 7)
    collector.server_step(node, "u.X", "m", phase=1)
    collector.trace_step("pathtrace.lifecycle.RestoreViewPhase", "execute")
    collector.enter_phase(6)
    collector.path_label = "GET-initial"
    assert collector.event_count() == 3
    summary = collector.summary()
    assert summary == PhaseSummary("r9", (1, 6), "GET-initial")
    [step] = collector.trace.steps
    assert (step.phase, step.note) == (1, "view-recreated")


def test_collector_finalize_filters_and_orders():
    collector = MetadataCollector("r9")
    collector.enter_phase(6)
    for cid in ("a", "b", "c"):
        collector.draft_for(FakeNode(cid))
    out = collector.finalize(None, order=["c", "a", "zz"])
    assert [r.component_id for r in out] == ["c", "a"]
    assert out[0].session_id is None
