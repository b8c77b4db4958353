#!/usr/bin/env python3
"""Walk the demo app through its four canonical requests and narrate
what the embedded provenance says about each response."""

import argparse
import sys

from pathtrace.app import Application, load_app_config
from pathtrace.demo import demo_config_path
from pathtrace.lifecycle import RequestEnvelope, process_request
from pathtrace.provenance import decode_page
from pathtrace.sessions import SessionStore


def show(step: str, response) -> None:
    page = decode_page(response.body)
    summary = page.summary
    print(f"== {step}")
    print(f"   label={summary.path_label}  phases={list(summary.phases_executed)}  "
          f"records={len(page.records)}  bytes={len(response.body)}")
    for record in page.records:
        origin = f"{record.source.file}:{record.source.line}" if record.source else "-"
        path = " -> ".join(f"{s.unit.rsplit('.', 1)[-1]}.{s.method}[{s.phase}]"
                           for s in record.server_path)
        print(f"   {record.component_id:<10} {record.tag or '-':<17} {origin:<18} {path}")
    if page.errors:
        print(f"   decode errors: {page.errors}")
    print()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(demo_config_path()))
    args = parser.parse_args(argv)
    app = Application(load_app_config(args.config))
    store = SessionStore()
    session_id = None
    counter = 0

    def run(method, view, params=None, ajax=False):
        nonlocal session_id, counter
        counter += 1
        env = RequestEnvelope(
            method=method, path=f"/pages/{view}",
            params={k: [v] for k, v in (params or {}).items()},
            ajax=ajax, session_id=session_id, request_id=f"r{counter:06d}",
        )
        response, session = process_request(app, env, store)
        session_id = session.id
        return response

    show("GET form.xhtml (first visit)", run("GET", "form.xhtml"))
    show("POST form.xhtml (name left empty)",
         run("POST", "form.xhtml", {"name": "", "age": "36", "send": "Send"}))
    show("POST form.xhtml (valid, navigates)",
         run("POST", "form.xhtml", {"name": "Grace", "age": "41", "send": "Send"}))
    run("GET", "calendar.xhtml")
    show("AJAX calendar.xhtml (param2 set)",
         run("POST", "calendar.xhtml",
             {"render": "cal", "param2": "x", "cal": "2026-08-24"}, ajax=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
