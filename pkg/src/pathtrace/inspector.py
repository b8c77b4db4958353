"""Terminal inspector for provenance-bearing pages.

Works purely from the embedded markers of a saved or fetched page: list the
described components, or select one by id or tag and emit its editor-ready
source locations (text) or the full report (json).
"""

from __future__ import annotations

import argparse
import sys
import urllib.error
import urllib.request
from dataclasses import dataclass

from .provenance import (
    DecodedPage,
    PhaseSummary,
    ProvenanceRecord,
    canonical_json,
    decode_page,
)

REPORT_SCHEMA = "prov-report/1"
PAGES_PREFIX = "pages"


class _Parser(argparse.ArgumentParser):
    # Usage problems must exit 1; argparse's default of 2 is taken by
    # the no-provenance/no-such-component outcome.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


@dataclass
class InspectionReport:
    component_id: str
    tag: str | None
    attributes: list[dict]
    server_path: list[dict]
    locations: list[str]
    phase_summary: PhaseSummary | None

    def to_dict(self) -> dict:
        out: dict = {"schema": REPORT_SCHEMA, "component_id": self.component_id}
        if self.tag is not None:
            out["tag"] = self.tag
        out["attributes"] = self.attributes
        out["server_path"] = self.server_path
        out["locations"] = self.locations
        if self.phase_summary is not None:
            out["phase_summary"] = {
                "request_id": self.phase_summary.request_id,
                "phases_executed": list(self.phase_summary.phases_executed),
                "path_label": self.phase_summary.path_label,
            }
        return out


def build_report(record: ProvenanceRecord, summary: PhaseSummary | None) -> InspectionReport:
    attributes = [
        {"name": e.name, "value": e.value, "set_by": e.by, "line": e.line}
        for e in record.attribute_events
    ]
    server_path = [
        {"unit": s.unit, "method": s.method, "phase": s.phase}
        for s in record.server_path
    ]
    locations: list[str] = []
    if record.source is not None:
        lines = [record.source.line] + [e.line for e in record.attribute_events if e.line > 0]
        for line in lines:
            loc = f"{PAGES_PREFIX}/{record.source.file}:{line}"
            if loc not in locations:
                locations.append(loc)
    return InspectionReport(
        component_id=record.component_id,
        tag=record.tag,
        attributes=attributes,
        server_path=server_path,
        locations=locations,
        phase_summary=summary,
    )


def read_source(source: str) -> str:
    if source.startswith(("http://", "https://")):
        with urllib.request.urlopen(source, timeout=10) as response:
            return response.read().decode("utf-8")
    with open(source, "r", encoding="utf-8") as handle:
        return handle.read()


def _row_location(record: ProvenanceRecord) -> str:
    if record.source is None:
        return "-"
    return f"{PAGES_PREFIX}/{record.source.file}:{record.source.line}"


def _emit_list(page: DecodedPage, fmt: str) -> None:
    rows = [
        {"id": r.component_id, "tag": r.tag or "-", "location": _row_location(r)}
        for r in page.records
    ]
    if fmt == "json":
        print(canonical_json(rows))
        return
    if not rows:
        return
    widths = {
        key: max(len(key), *(len(row[key]) for row in rows)) for key in ("id", "tag")
    }
    print(f"{'id'.ljust(widths['id'])}  {'tag'.ljust(widths['tag'])}  location")
    for row in rows:
        print(f"{row['id'].ljust(widths['id'])}  {row['tag'].ljust(widths['tag'])}  "
              f"{row['location']}")


def _emit_reports(reports: list[InspectionReport], fmt: str, single: bool) -> None:
    if fmt == "json":
        if single:
            print(canonical_json(reports[0].to_dict()))
        else:
            print(canonical_json([r.to_dict() for r in reports]))
        return
    emitted = False
    for report in reports:
        for location in report.locations:
            print(location)
            emitted = True
    if reports and not emitted:
        print("warning: no locations recorded for this component", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(
        prog="pathtrace-inspect",
        description="Inspect the provenance markers embedded in a rendered page.",
    )
    parser.add_argument("source", help="file path or URL of a rendered page")
    selector = parser.add_mutually_exclusive_group()
    selector.add_argument("--id", dest="component_id", help="select one component by id")
    selector.add_argument("--tag", help="select all components with this ns:name tag")
    selector.add_argument("--list", action="store_true", dest="list_all",
                          help="list described components (default)")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    args = parser.parse_args(argv)

    try:
        text = read_source(args.source)
    except (OSError, urllib.error.URLError, UnicodeDecodeError) as exc:
        print(f"cannot read {args.source}: {exc}", file=sys.stderr)
        return 1

    page = decode_page(text)
    if not page.records and page.summary is None and not page.errors:
        print(
            "no provenance markers in this page; it was stripped or served "
            "with instrumentation off (__prov=off)",
            file=sys.stderr,
        )
        return 2

    if args.component_id is not None:
        matches = [r for r in page.records if r.component_id == args.component_id]
        if not matches:
            print(f"no component {args.component_id!r} in this page", file=sys.stderr)
            return 2
        _emit_reports([build_report(matches[0], page.summary)], args.format, single=True)
    elif args.tag is not None:
        matches = [r for r in page.records if r.tag == args.tag]
        _emit_reports(
            [build_report(r, page.summary) for r in matches], args.format, single=False
        )
    else:
        _emit_list(page, args.format)

    if page.errors:
        for issue in page.errors:
            who = issue.component_id or f"marker #{issue.index}"
            print(f"decode error in {who}: {issue.reason}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
