"""End-to-end acceptance gate.

Each test prints one PASS/FAIL line for its criterion, so a plain pytest run
doubles as a checklist. Criteria are phrased as observable behavior only.
"""

from __future__ import annotations

import random
import time

from conftest import Driver, HttpClient
from oracles import oracle_matches, sample_expressions, sample_join_points
from pathtrace.pointcuts import JoinPointId, matches, parse_pointcut
from pathtrace.provenance import (
    AttributeEvent,
    PhaseSummary,
    ProvenanceRecord,
    ServerPathEntry,
    decode_page,
    encode_page,
    strip,
)
from pathtrace.sessions import SessionStore
from pathtrace.template import SourceLocation


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


def run_scenario(driver: Driver) -> list:
    out = [driver.get("form.xhtml")]
    out.append(driver.post("form.xhtml", name="", age="36", send="Send"))
    out.append(driver.post("form.xhtml", name="Grace", age="41", send="Send"))
    driver.get("calendar.xhtml")
    out.append(driver.ajax("calendar.xhtml", render="cal", param2="x"))
    return out


def test_scenario_reproduction(demo_app):
    started = time.monotonic()
    driver = Driver(demo_app, SessionStore())
    responses = run_scenario(driver)
    summaries = [decode_page(r.body).summary for r in responses]
    phase_sets = [s.phases_executed for s in summaries]
    expected = [(1, 6), (1, 2, 3, 6), (1, 2, 3, 4, 5, 6), (1, 2, 3, 4, 5, 6)]
    labels = [s.path_label for s in summaries]

    special = decode_page(responses[3].body)
    cal_units = [
        s.unit
        for r in special.records if r.component_id == "cal"
        for s in r.server_path
    ]
    with_special = ("pathtrace.ajax.ParamInterceptor" in cal_units
                    and "pathtrace.ajax.SpecialAjaxHandler" in cal_units
                    and "pathtrace.ajax.DefaultAjaxHandler" not in cal_units)

    plain_driver = Driver(demo_app, SessionStore())
    plain_driver.get("calendar.xhtml")
    default_reply = plain_driver.ajax("calendar.xhtml", render="cal", param1="x")
    default_units = [
        s.unit
        for r in decode_page(default_reply.body).records if r.component_id == "cal"
        for s in r.server_path
    ]
    with_default = ("pathtrace.ajax.DefaultAjaxHandler" in default_units
                    and "pathtrace.ajax.SpecialAjaxHandler" not in default_units)

    elapsed = time.monotonic() - started
    ok = (phase_sets == expected
          and labels == ["GET-initial", "POST-validation-failed",
                         "POST-navigated", "AJAX-special"]
          and with_special and with_default and elapsed < 5.0)
    report("scenario reproduction", ok,
           f"phases {phase_sets}, labels {labels}, {elapsed:.2f}s")


def test_transparency(demo_app, generated_app, generated_pages):
    mismatches = []
    demo_pages = ["form.xhtml", "calendar.xhtml", "done.xhtml"]
    for app, names in ((demo_app, demo_pages),
                       (generated_app, [n for n, _ in generated_pages])):
        for name in names:
            traced = Driver(app, SessionStore(), enabled=True).get(name)
            plain = Driver(app, SessionStore(), enabled=False).get(name)
            if strip(traced.body) != plain.body:
                mismatches.append(name)
    checked = len(demo_pages) + len(generated_pages)
    report("transparency", not mismatches and len(generated_pages) >= 100,
           f"{checked} pages byte-compared, {len(mismatches)} mismatches")


def test_pointcut_matcher_equivalence():
    listing = [
        "execution(* javax.faces.component.html.*->set*(..))",
        "execution(* org.richfaces.component.html.*->set*(..))",
    ]
    expressions = [parse_pointcut(t) for t in sample_expressions()]
    assert all(any(str(e) == t for e in expressions) for t in listing)
    join_points = sample_join_points(random.Random(2026), 50)
    join_points += [
        JoinPointId("javax.faces.component.html.HtmlInputText", "setValue", 1),
        JoinPointId("javax.faces.component.html.HtmlInputText", "setStyleClass", 1),
        JoinPointId("org.richfaces.component.html.HtmlCalendar", "setStyleClass", 1),
        JoinPointId("org.richfaces.component.html.HtmlCalendar", "getValue", 0),
    ]
    pairs = [(e, jp) for e in expressions for jp in join_points]
    disagreements = [
        (str(e), jp) for e, jp in pairs if matches(e, jp) != oracle_matches(e, jp)
    ]
    listing_hits = sum(
        1 for t in listing for jp in join_points
        if matches(parse_pointcut(t), jp)
    )
    ok = (len(expressions) >= 20 and len(join_points) >= 50
          and not disagreements and listing_hits >= 2)
    report("pointcut matcher equivalence", ok,
           f"{len(expressions)} expressions x {len(join_points)} join points, "
           f"{len(disagreements)} disagreements")


def test_line_number_fidelity(demo_app, generated_app, generated_pages):
    import re

    bad = []
    total = 0
    corpus = [(demo_app, n) for n in ("form.xhtml", "calendar.xhtml", "done.xhtml")]
    corpus += [(generated_app, n) for n, _ in generated_pages]
    for app, name in corpus:
        text = (app.config.pages_dir / name).read_text(encoding="utf-8")
        opens = {}
        for lineno, line in enumerate(text.split("\n"), start=1):
            for m in re.finditer(r'<ui:\w+[^<>]*?\bid="([^"]+)"', line):
                opens[m.group(1)] = lineno
        response = Driver(app, SessionStore()).get(name)
        for record in decode_page(response.body).records:
            if record.component_id in opens:
                total += 1
                if record.source is None or record.source.line != opens[record.component_id]:
                    bad.append((name, record.component_id))
    report("line-number fidelity", total > 0 and not bad,
           f"{total} components checked, {len(bad)} wrong")


def test_codec_round_trip():
    rng = random.Random(99)
    units = ("demo.component.html.InputText", "pathtrace.model.ModelBag",
             "demo.render.html.PanelRenderer")

    def random_record(i: int) -> ProvenanceRecord:
        events = tuple(
            AttributeEvent(rng.choice(("id", "value", "styleClass")),
                           "".join(rng.choices("abc<>&\"'é中 ", k=rng.randint(0, 8))),
                           rng.choice(units), rng.randint(0, 200))
            for _ in range(rng.randint(0, 3))
        )
        path = tuple(
            ServerPathEntry(rng.choice(units), rng.choice(("set", "get", "encode")),
                            rng.randint(1, 6))
            for _ in range(rng.randint(0, 4))
        )
        source = (None if rng.random() < 0.2 else
                  SourceLocation("form.xhtml", rng.randint(1, 300), rng.randint(1, 90)))
        return ProvenanceRecord(
            component_id=f"c{i}", type_path=rng.choice(units),
            tag=rng.choice((None, "ui:inputText", "ui:panel")),
            source=source, attribute_events=events, server_path=path,
            request_id=f"r{rng.randint(1, 10 ** 6):06d}",
            session_id=rng.choice((None, "%016x" % rng.getrandbits(64))),
        )

    trials = 400
    cases = 0
    failures = 0
    isolated = 0
    for trial in range(trials):
        records = [random_record(i) for i in range(rng.randint(1, 5))]
        summary = PhaseSummary(f"r{trial}", (1, 2, 3, 4, 5, 6), "POST-navigated")
        html = "<html><body>" + "".join(
            f'<div id="{r.component_id}">.</div>' for r in records
        ) + "</body></html>"
        encoded = encode_page(html, records, summary)
        decoded = decode_page(encoded)
        cases += len(records)
        if decoded.records != records or decoded.summary != summary or decoded.errors:
            failures += 1
        victim = rng.randrange(len(records))
        needle = f'data-for="c{victim}" value="'
        at = encoded.index(needle) + len(needle)
        corrupted = encoded[:at] + "#" + encoded[at:]
        broken = decode_page(corrupted)
        survivors = [r for i, r in enumerate(records) if i != victim]
        if (broken.records == survivors and len(broken.errors) == 1
                and broken.errors[0].component_id == f"c{victim}"):
            isolated += 1
    ok = cases >= 1000 and failures == 0 and isolated == trials
    report("codec round trip", ok,
           f"{cases} records over {trials} pages, {failures} failures, "
           f"{isolated}/{trials} corruptions isolated")


def test_advice_chain_integrity(demo_app):
    import json as json_mod

    from pathtrace.interception import RequestContext, dispatch, use_context, weave
    from pathtrace.pointcuts import load_aspect_config
    from pathtrace.provenance import MetadataCollector

    rng = random.Random(17)
    order_ok = True
    once_ok = True
    for _ in range(200):
        names = [f"a{i}" for i in range(rng.randint(0, 5))]
        log: list[str] = []

        class Chain:
            def __getattr__(self, advice_name):
                def body(inv):
                    log.append(advice_name)
                    return inv.invoke_next()
                return body

        config = load_aspect_config(json_mod.dumps({
            "aspects": ["t.Chain"],
            "bindings": [
                {"pointcut": "execution(* d.X->m(..))", "advice": n, "aspect": "t.Chain"}
                for n in names
            ],
        }))
        bound = weave(config, {"t.Chain": Chain()})
        ctx = RequestContext("t", None, MetadataCollector("t"), bound=bound)
        calls: list[int] = []
        with use_context(ctx):
            dispatch(JoinPointId("d.X", "m", 0), lambda: calls.append(1))
        order_ok = order_ok and log == names
        once_ok = once_ok and calls == [1]

    off = MetadataCollector("t", enabled=False)
    ctx = RequestContext("t", None, off, bound=demo_app.bindings)
    with use_context(ctx):
        dispatch(JoinPointId("demo.component.html.InputText", "setValue", 1),
                 lambda: None, args=("x",))
    silent_ok = off.event_count() == 0 and not off.trace.steps

    quiet = Driver(demo_app, SessionStore(), enabled=False)
    quiet_reply = quiet.get("form.xhtml")
    page_silent = ("prov-meta" not in quiet_reply.body
                   and "prov-summary" not in quiet_reply.body)
    ok = order_ok and once_ok and silent_ok and page_silent
    report("advice chain integrity", ok,
           f"order={order_ok} once={once_ok} off-silent={silent_ok and page_silent}")


def test_concurrency(demo_app):
    import threading

    from pathtrace.server import PathtraceServer

    server = PathtraceServer(("127.0.0.1", 0), demo_app)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    started = time.monotonic()
    problems: list[str] = []

    def scenario(worker: int) -> None:
        client = HttpClient(f"http://{host}:{port}")
        try:
            for i in range(50):
                me = f"w{worker}i{i}"
                client.get("/pages/form.xhtml")
                failed = client.post(
                    "/pages/form.xhtml",
                    data={"name": "", "age": "36", "send": "Send"})
                if decode_page(failed.body).summary.path_label != "POST-validation-failed":
                    problems.append(f"{me}: wrong failure label")
                done = client.post(
                    "/pages/form.xhtml",
                    data={"name": me, "age": str(20 + worker), "send": "Send"})
                page = decode_page(done.body)
                if page.summary.path_label != "POST-navigated":
                    problems.append(f"{me}: wrong success label")
                if f'value="{me}"' not in done.body:
                    problems.append(f"{me}: lost own submission")
                sid = client.cookie.split("=", 1)[1]
                for record in page.records:
                    if record.session_id != sid:
                        problems.append(f"{me}: foreign session in record")
                if page.errors:
                    problems.append(f"{me}: decode errors")
                client.get("/pages/calendar.xhtml")
                partial = client.post(
                    "/pages/calendar.xhtml",
                    data={"render": "cal", "param2": "x", "cal": me},
                    headers={"X-Ajax": "true"})
                decoded = decode_page(partial.body)
                if decoded.summary.path_label != "AJAX-special":
                    problems.append(f"{me}: wrong ajax label")
                if me not in partial.body:
                    problems.append(f"{me}: foreign ajax body")
        except Exception as exc:
            problems.append(f"w{worker}: {exc!r}")

    workers = [threading.Thread(target=scenario, args=(n,)) for n in range(8)]
    for w in workers:
        w.start()
    for w in workers:
        w.join(timeout=110)
    elapsed = time.monotonic() - started
    server.shutdown()
    server.server_close()
    ok = not problems and elapsed < 60.0
    report("concurrency", ok,
           f"8 clients x 50 iterations in {elapsed:.1f}s, "
           f"{len(problems)} problems" + (f"; first: {problems[0]}" if problems else ""))
