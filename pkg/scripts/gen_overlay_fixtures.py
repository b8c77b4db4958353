#!/usr/bin/env python3
"""Regenerate the static pages and reference reports used by the overlay tests.

The "updated" calendar page reproduces what the page's own refresh script
leaves in the DOM after a param2 partial update: stale cal markers removed,
the element and its fresh markers spliced in place.
"""

import argparse
import json
import re
import sys
from pathlib import Path

from pathtrace.app import Application, load_app_config
from pathtrace.demo import demo_config_path
from pathtrace.inspector import build_report
from pathtrace.lifecycle import RequestEnvelope, process_request
from pathtrace.provenance import (
    AttributeEvent,
    PhaseSummary,
    ProvenanceRecord,
    ServerPathEntry,
    canonical_json,
    decode_page,
    encode_page,
)
from pathtrace.sessions import SessionStore
from pathtrace.template import SourceLocation

STALE_META = re.compile(r'<input[^<>]*class="prov-meta" data-for="cal"[^<>]*/>')
STALE_SUMMARY = re.compile(r'<input[^<>]*class="prov-summary"[^<>]*/>')
CAL_ELEMENT = re.compile(r'<div id="cal".*?</div>', re.S)


def splice(full_page: str, partial: str) -> str:
    page = STALE_META.sub("", full_page)
    page = STALE_SUMMARY.sub("", page)
    return CAL_ELEMENT.sub(lambda _: partial, page, count=1)


def report_json(page_html: str, component_id: str) -> str:
    page = decode_page(page_html)
    record = next(r for r in page.records if r.component_id == component_id)
    return canonical_json(build_report(record, page.summary).to_dict())


def unicode_page() -> str:
    """A hand-built page whose payloads stress JSON escaping and non-ASCII."""
    advice = "pathtrace.aop.ComponentAdvice"
    record = ProvenanceRecord(
        component_id="greet",
        type_path="demo.component.html.InputText",
        tag="ui:inputText",
        source=SourceLocation("unicode.xhtml", 4, 3),
        attribute_events=(
            AttributeEvent("value", "héllo ☃ ünïcode 🙂", advice, 4),
            AttributeEvent("title", 'quote"back\\slash', advice, 4),
            AttributeEvent("note", "line1\nline2\ttab \x07bell", advice, 0),
        ),
        server_path=(
            ServerPathEntry("demo.taglib.InputTextTag", "createComponent", 1),
            ServerPathEntry("demo.render.html.InputTextRenderer", "encode", 6),
        ),
        request_id="r000099",
    )
    summary = PhaseSummary("r000099", (1, 6), "GET-initial")
    html = (
        "<html>\n<head><title>Unicode</title></head>\n<body>\n"
        "<p>Intro</p>\n"
        '<div id="greet" data-comp="demo.component.html.InputText">héllo</div>\n'
        "</body>\n</html>\n"
    )
    return encode_page(html, [record], summary)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=None,
                        help="fixture directory (default: frontend/tests/fixtures)")
    args = parser.parse_args(argv)
    root = Path(__file__).resolve().parent.parent
    out = Path(args.out) if args.out else root / "frontend" / "tests" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)

    app = Application(load_app_config(demo_config_path()))
    store = SessionStore()
    state = {"sid": None, "n": 0}

    def run(method, view, params=None, ajax=False):
        state["n"] += 1
        env = RequestEnvelope(
            method=method, path=f"/pages/{view}",
            params={k: [v] for k, v in (params or {}).items()},
            ajax=ajax, session_id=state["sid"], request_id=f"r{state['n']:06d}",
        )
        response, session = process_request(app, env, store)
        state["sid"] = session.id
        return response

    form_full = run("GET", "form.xhtml").body
    calendar_full = run("GET", "calendar.xhtml").body
    partial = run("POST", "calendar.xhtml",
                  {"render": "cal", "param2": "1"}, ajax=True).body
    calendar_updated = splice(calendar_full, partial)

    unicode_html = unicode_page()
    files = {
        "form_full.html": form_full,
        "calendar_full.html": calendar_full,
        "calendar_param2.html": partial,
        "calendar_updated.html": calendar_updated,
        "unicode_page.html": unicode_html,
        "cli_report_cal.json": report_json(calendar_updated, "cal") + "\n",
        "cli_report_name.json": report_json(form_full, "name") + "\n",
        "cli_report_unicode.json": report_json(unicode_html, "greet") + "\n",
    }
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")
        print(f"wrote {out / name} ({len(text)} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
