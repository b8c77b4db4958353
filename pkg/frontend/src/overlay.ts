/**
 * In-page inspector for provenance-bearing pages.
 *
 * Served by the dev server at /__prov/overlay.js and loaded as a classic
 * script. It decodes the hidden prov-meta / prov-summary markers embedded
 * in the page and adds an Inspect mode: hover highlights elements that
 * carry a record, clicking one opens a panel with two tabs (the recorded
 * attribute writes and the server-side path) plus an Export JSON control
 * whose output matches the terminal inspector's json format byte for byte.
 *
 * Everything the overlay adds lives under one host element; no other DOM
 * node is ever created, removed, reordered, or written to.
 */
(() => {
  "use strict";

  const SCHEMA = "prov/1";
  const REPORT_SCHEMA = "prov-report/1";
  const PAGES_PREFIX = "pages";
  const HOST_ID = "pathtrace-overlay";

  const NOTICE_NO_PROVENANCE = "no provenance on this page";
  const NOTICE_BAD_SCHEMA = "provenance schema not supported by this overlay";
  const NOTICE_UNREADABLE = "provenance markers could not be decoded";
  const TOOLTIP_NOT_INSTRUMENTED = "not instrumented";
  const TOOLTIP_MS = 1600;

  type OverlayMode = "idle" | "picking" | "showing";
  type TabName = "attributes" | "path";

  interface AttributeEvent {
    name: string;
    value: string;
    by: string;
    line: number;
  }

  interface ServerPathEntry {
    unit: string;
    method: string;
    phase: number;
  }

  interface SourceRef {
    file: string;
    line: number;
    column: number;
  }

  interface ProvRecord {
    componentId: string;
    typePath: string;
    tag: string | null;
    source: SourceRef | null;
    attributeEvents: AttributeEvent[];
    serverPath: ServerPathEntry[];
    requestId: string;
    sessionId: string | null;
  }

  interface PhaseSummary {
    requestId: string;
    phasesExecuted: number[];
    pathLabel: string;
  }

  interface DecodeFailure {
    index: number;
    componentId: string | null;
    reason: string;
  }

  interface PageData {
    records: Map<string, ProvRecord>;
    summary: PhaseSummary | null;
    failures: DecodeFailure[];
    markerCount: number;
  }

  interface OverlayController {
    host: HTMLElement;
    mode(): OverlayMode;
    selected(): string | null;
    toggle(): void;
    refresh(): PageData;
    exportReport(componentId: string): string | null;
    exports: string[];
    deactivate(): void;
  }

  class PayloadError extends Error {
    readonly reason: string;

    constructor(reason: string) {
      super(reason);
      this.name = "PayloadError";
      this.reason = reason;
    }
  }

  /* ------------------------------------------------------------------ *
   * Marker decoding. Same acceptance rules as the server-side codec:
   * strict url-safe base64, strict UTF-8, a JSON object, schema prov/1,
   * integer phases 1..6 and non-negative integer event lines.
   * ------------------------------------------------------------------ */

  function decodePayload(text: string): Record<string, unknown> {
    // Accept standard alphabet too: the server decodes by translating
    // -_ to +/ and then validating, so mixed payloads pass there as well.
    if (!/^[A-Za-z0-9+/_-]*={0,2}$/.test(text) || text.length % 4 !== 0) {
      throw new PayloadError("bad-base64");
    }
    let binary: string;
    try {
      binary = atob(text.replace(/-/g, "+").replace(/_/g, "/"));
    } catch {
      throw new PayloadError("bad-base64");
    }
    const bytes = Uint8Array.from(binary, (ch) => ch.charCodeAt(0));
    let decoded: string;
    try {
      decoded = new TextDecoder("utf-8", { fatal: true }).decode(bytes);
    } catch {
      throw new PayloadError("bad-json");
    }
    let data: unknown;
    try {
      data = JSON.parse(decoded);
    } catch {
      throw new PayloadError("bad-json");
    }
    if (typeof data !== "object" || data === null || Array.isArray(data)) {
      throw new PayloadError("bad-json");
    }
    return data as Record<string, unknown>;
  }

  function requireString(data: Record<string, unknown>, key: string): string {
    const value = data[key];
    if (typeof value !== "string") throw new PayloadError(`bad-field:${key}`);
    return value;
  }

  function requireList(data: Record<string, unknown>, key: string): unknown[] {
    const value = data[key];
    if (!Array.isArray(value)) throw new PayloadError(`bad-field:${key}`);
    return value;
  }

  function asEntry(raw: unknown, field: string): Record<string, unknown> {
    if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
      throw new PayloadError(`bad-field:${field}`);
    }
    return raw as Record<string, unknown>;
  }

  function parseSource(raw: unknown): SourceRef | null {
    if (raw === undefined || raw === null) return null;
    const data = asEntry(raw, "source");
    for (const key of ["file", "line", "column"]) {
      if (!(key in data)) throw new PayloadError("bad-field:source");
    }
    return {
      file: data.file as string,
      line: data.line as number,
      column: data.column as number,
    };
  }

  function parseRecord(data: Record<string, unknown>): ProvRecord {
    if (data.schema !== SCHEMA) throw new PayloadError("bad-schema");
    const events: AttributeEvent[] = [];
    for (const raw of requireList(data, "attribute_events")) {
      const entry = asEntry(raw, "attribute_events");
      for (const key of ["name", "value", "by", "line"]) {
        if (!(key in entry)) throw new PayloadError("bad-field:attribute_events");
      }
      const line = entry.line;
      if (typeof line !== "number" || !Number.isInteger(line) || line < 0) {
        throw new PayloadError("bad-field:attribute_events");
      }
      events.push({
        name: entry.name as string,
        value: entry.value as string,
        by: entry.by as string,
        line,
      });
    }
    const path: ServerPathEntry[] = [];
    for (const raw of requireList(data, "server_path")) {
      const entry = asEntry(raw, "server_path");
      for (const key of ["unit", "method", "phase"]) {
        if (!(key in entry)) throw new PayloadError("bad-field:server_path");
      }
      const phase = entry.phase;
      if (typeof phase !== "number" || !Number.isInteger(phase) || phase < 1 || phase > 6) {
        throw new PayloadError("bad-field:server_path");
      }
      path.push({
        unit: entry.unit as string,
        method: entry.method as string,
        phase,
      });
    }
    return {
      componentId: requireString(data, "component_id"),
      typePath: requireString(data, "type_path"),
      tag: (data.tag ?? null) as string | null,
      source: parseSource(data.source),
      attributeEvents: events,
      serverPath: path,
      requestId: requireString(data, "request_id"),
      sessionId: (data.session_id ?? null) as string | null,
    };
  }

  function parseSummary(data: Record<string, unknown>): PhaseSummary {
    if (data.schema !== SCHEMA) throw new PayloadError("bad-schema");
    const phases = requireList(data, "phases_executed");
    if (!phases.every((p) => typeof p === "number" && Number.isInteger(p))) {
      throw new PayloadError("bad-field:phases_executed");
    }
    return {
      requestId: requireString(data, "request_id"),
      phasesExecuted: phases as number[],
      pathLabel: requireString(data, "path_label"),
    };
  }

  function scanPage(doc: Document, host: Element | null): PageData {
    const records = new Map<string, ProvRecord>();
    const failures: DecodeFailure[] = [];
    let summary: PhaseSummary | null = null;
    let markerCount = 0;
    const markers = doc.querySelectorAll("input.prov-meta, input.prov-summary");
    markers.forEach((marker) => {
      if (host !== null && host.contains(marker)) return;
      const index = markerCount;
      markerCount += 1;
      const isMeta = marker.classList.contains("prov-meta");
      try {
        const data = decodePayload(marker.getAttribute("value") ?? "");
        if (isMeta) {
          const record = parseRecord(data);
          // First marker wins for duplicate ids, like the terminal inspector.
          if (!records.has(record.componentId)) records.set(record.componentId, record);
        } else {
          summary = parseSummary(data);
        }
      } catch (err) {
        if (!(err instanceof PayloadError)) throw err;
        failures.push({
          index,
          componentId: marker.getAttribute("data-for"),
          reason: err.reason,
        });
      }
    });
    return { records, summary, failures, markerCount };
  }

  /* ------------------------------------------------------------------ *
   * Exported report. Field-for-field the terminal inspector's json
   * format; byte equality comes from building the objects in the same
   * key order and serializing compact with literal unicode.
   * ------------------------------------------------------------------ */

  function buildReport(record: ProvRecord, summary: PhaseSummary | null): Record<string, unknown> {
    const out: Record<string, unknown> = {
      schema: REPORT_SCHEMA,
      component_id: record.componentId,
    };
    if (record.tag !== null) out.tag = record.tag;
    out.attributes = record.attributeEvents.map((e) => ({
      name: e.name,
      value: e.value,
      set_by: e.by,
      line: e.line,
    }));
    out.server_path = record.serverPath.map((s) => ({
      unit: s.unit,
      method: s.method,
      phase: s.phase,
    }));
    const locations: string[] = [];
    if (record.source !== null) {
      const lines = [
        record.source.line,
        ...record.attributeEvents.filter((e) => e.line > 0).map((e) => e.line),
      ];
      for (const line of lines) {
        const loc = `${PAGES_PREFIX}/${record.source.file}:${line}`;
        if (!locations.includes(loc)) locations.push(loc);
      }
    }
    out.locations = locations;
    if (summary !== null) {
      out.phase_summary = {
        request_id: summary.requestId,
        phases_executed: summary.phasesExecuted,
        path_label: summary.pathLabel,
      };
    }
    return out;
  }

  /* ------------------------------------------------------------------ *
   * Overlay chrome. One host element in the light DOM, everything else
   * behind an open shadow root so page styles cannot leak in. The only
   * light-DOM child is the crosshair cursor rule, toggled with picking
   * mode, because shadow styles cannot reach the page.
   * ------------------------------------------------------------------ */

  const CHROME_CSS = `
:host { all: initial; }
[hidden] { display: none !important; }
.pt-toggle {
  position: fixed; right: 16px; bottom: 16px; z-index: 2147483647;
  font: 13px/1.4 system-ui, sans-serif; padding: 6px 14px;
  border-radius: 16px; border: 1px solid #1e3a8a;
  background: #1d4ed8; color: #ffffff; cursor: pointer;
}
.pt-toggle[aria-pressed="true"] { background: #9a3412; border-color: #7c2d12; }
.pt-highlight {
  position: fixed; pointer-events: none; z-index: 2147483645;
  border: 2px solid #2563eb; background: rgba(37, 99, 235, 0.14);
  border-radius: 3px;
}
.pt-notice {
  position: fixed; top: 12px; left: 50%; transform: translateX(-50%);
  z-index: 2147483647; background: #111827; color: #f9fafb;
  font: 12px/1.4 ui-monospace, SFMono-Regular, Menlo, monospace;
  padding: 6px 12px; border-radius: 6px; max-width: 70vw;
}
.pt-panel {
  position: fixed; right: 16px; bottom: 56px; width: 400px;
  max-height: 60vh; overflow: auto; z-index: 2147483646;
  background: #ffffff; color: #111827;
  border: 1px solid #d1d5db; border-radius: 8px;
  box-shadow: 0 8px 24px rgba(0, 0, 0, 0.25);
  font: 12px/1.5 ui-monospace, SFMono-Regular, Menlo, monospace;
}
.pt-panel-head {
  display: flex; align-items: baseline; gap: 8px;
  padding: 8px 10px; border-bottom: 1px solid #d1d5db;
}
.pt-title { font-weight: 700; }
.pt-sub { color: #6b7280; flex: 1; }
.pt-close { border: 0; background: none; cursor: pointer; font-size: 14px; }
.pt-tabs { display: flex; border-bottom: 1px solid #d1d5db; }
.pt-tab {
  flex: 1; padding: 6px 0; border: 0; background: #f3f4f6;
  cursor: pointer; font: inherit;
}
.pt-tab[data-active="true"] { background: #ffffff; font-weight: 700; }
.pt-tab-body table { width: 100%; border-collapse: collapse; }
.pt-tab-body th, .pt-tab-body td {
  text-align: left; padding: 3px 8px; vertical-align: top;
  border-bottom: 1px solid #e5e7eb; word-break: break-word;
}
.pt-tab-body th { color: #6b7280; font-weight: 600; }
.pt-panel-foot {
  display: flex; align-items: center; gap: 8px;
  padding: 8px 10px; border-top: 1px solid #d1d5db;
}
.pt-summary-line { flex: 1; color: #6b7280; }
.pt-export {
  border: 1px solid #1e3a8a; background: #1d4ed8; color: #ffffff;
  border-radius: 4px; padding: 4px 10px; cursor: pointer; font: inherit;
}
`;

  const CHROME_HTML = `
<button class="pt-toggle" type="button" aria-pressed="false">Inspect</button>
<div class="pt-notice" hidden></div>
<div class="pt-highlight" hidden></div>
<section class="pt-panel" hidden>
  <header class="pt-panel-head">
    <span class="pt-title"></span>
    <span class="pt-sub"></span>
    <button class="pt-close" type="button" aria-label="Close">close</button>
  </header>
  <nav class="pt-tabs">
    <button class="pt-tab" data-tab="attributes" type="button">Attributes</button>
    <button class="pt-tab" data-tab="path" type="button">Server Path</button>
  </nav>
  <div class="pt-tab-body"></div>
  <footer class="pt-panel-foot">
    <span class="pt-summary-line"></span>
    <button class="pt-export" type="button">Export JSON</button>
  </footer>
</section>
`;

  function renderTable(
    doc: Document,
    headers: string[],
    rows: string[][],
  ): HTMLTableElement {
    const table = doc.createElement("table");
    const head = doc.createElement("tr");
    for (const caption of headers) {
      const th = doc.createElement("th");
      th.textContent = caption;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const row of rows) {
      const tr = doc.createElement("tr");
      for (const cell of row) {
        const td = doc.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    return table;
  }

  function triggerDownload(doc: Document, filename: string, text: string): void {
    // Best effort: environments without object URLs (tests) skip the
    // download; the payload is still recorded on controller.exports.
    if (typeof URL === "undefined" || typeof URL.createObjectURL !== "function") return;
    const url = URL.createObjectURL(new Blob([text], { type: "application/json" }));
    const anchor = doc.createElement("a");
    anchor.href = url;
    anchor.download = filename;
    anchor.click();
    URL.revokeObjectURL(url);
  }

  let active: OverlayController | null = null;

  function activate(doc: Document = document): OverlayController {
    if (active !== null) active.deactivate();

    const host = doc.createElement("div");
    host.id = HOST_ID;
    const shadow = host.attachShadow({ mode: "open" });
    const style = doc.createElement("style");
    style.textContent = CHROME_CSS;
    shadow.appendChild(style);
    const chrome = doc.createElement("div");
    chrome.innerHTML = CHROME_HTML;
    while (chrome.firstChild) shadow.appendChild(chrome.firstChild);

    const toggleBtn = shadow.querySelector(".pt-toggle") as HTMLButtonElement;
    const notice = shadow.querySelector(".pt-notice") as HTMLElement;
    const highlight = shadow.querySelector(".pt-highlight") as HTMLElement;
    const panel = shadow.querySelector(".pt-panel") as HTMLElement;
    const title = shadow.querySelector(".pt-title") as HTMLElement;
    const subtitle = shadow.querySelector(".pt-sub") as HTMLElement;
    const tabBody = shadow.querySelector(".pt-tab-body") as HTMLElement;
    const summaryLine = shadow.querySelector(".pt-summary-line") as HTMLElement;

    const cursorStyle = doc.createElement("style");
    cursorStyle.textContent = "html, body, body * { cursor: crosshair !important; }\n";

    let mode: OverlayMode = "idle";
    let activeTab: TabName = "attributes";
    let selectedId: string | null = null;
    let selectedEl: Element | null = null;
    let hoverEl: Element | null = null;
    let cache: PageData | null = null;
    let dirty = true;
    let tooltipTimer: ReturnType<typeof setTimeout> | null = null;

    function page(): PageData {
      if (cache === null || dirty) {
        cache = scanPage(doc, host);
        dirty = false;
      }
      return cache;
    }

    function blockingNotice(data: PageData): string | null {
      if (data.records.size > 0) return null;
      if (data.markerCount === 0) return NOTICE_NO_PROVENANCE;
      if (data.failures.some((f) => f.reason === "bad-schema")) return NOTICE_BAD_SCHEMA;
      return NOTICE_UNREADABLE;
    }

    function clearTooltipTimer(): void {
      if (tooltipTimer !== null) {
        clearTimeout(tooltipTimer);
        tooltipTimer = null;
      }
    }

    function showNotice(text: string, transient = false): void {
      clearTooltipTimer();
      notice.textContent = text;
      notice.hidden = false;
      if (transient) {
        tooltipTimer = setTimeout(() => {
          notice.hidden = true;
          tooltipTimer = null;
        }, TOOLTIP_MS);
      }
    }

    function hideNotice(): void {
      clearTooltipTimer();
      notice.hidden = true;
    }

    function positionHighlight(el: Element): void {
      const rect = el.getBoundingClientRect();
      highlight.style.left = `${rect.left}px`;
      highlight.style.top = `${rect.top}px`;
      highlight.style.width = `${rect.width}px`;
      highlight.style.height = `${rect.height}px`;
      highlight.setAttribute("data-target", el.id);
      highlight.hidden = false;
    }

    function hideHighlight(): void {
      hoverEl = null;
      highlight.hidden = true;
    }

    function findInstrumented(node: EventTarget | null): Element | null {
      let el = node instanceof Element ? node : null;
      while (el !== null && el !== doc.documentElement) {
        if (el === host) return null;
        if (el.id !== "" && page().records.has(el.id)) return el;
        el = el.parentElement;
      }
      return null;
    }

    function failureFor(node: EventTarget | null): DecodeFailure | null {
      const data = page();
      let el = node instanceof Element ? node : null;
      while (el !== null && el !== doc.documentElement) {
        const id = (el as HTMLElement).id;
        if (id !== "") {
          const hit = data.failures.find((f) => f.componentId === id);
          if (hit !== undefined) return hit;
        }
        el = el.parentElement;
      }
      return null;
    }

    function renderTabBody(record: ProvRecord): void {
      tabBody.textContent = "";
      if (activeTab === "attributes") {
        const rows = record.attributeEvents.map((e) => [
          e.name,
          String(e.value),
          e.by,
          String(e.line),
        ]);
        tabBody.appendChild(renderTable(doc, ["name", "value", "set_by", "line"], rows));
      } else {
        const rows = record.serverPath.map((s) => [
          s.unit,
          s.method,
          String(s.phase),
        ]);
        tabBody.appendChild(renderTable(doc, ["unit", "method", "phase"], rows));
      }
      shadow.querySelectorAll(".pt-tab").forEach((tab) => {
        tab.setAttribute("data-active", String(tab.getAttribute("data-tab") === activeTab));
      });
    }

    function openPanel(el: Element, record: ProvRecord): void {
      mode = "showing";
      selectedId = record.componentId;
      selectedEl = el;
      hideNotice();
      title.textContent = record.componentId;
      const where = record.source !== null
        ? ` ${PAGES_PREFIX}/${record.source.file}:${record.source.line}`
        : "";
      subtitle.textContent = `${record.tag ?? record.typePath}${where}`;
      const data = page();
      summaryLine.textContent = data.summary !== null
        ? `${data.summary.pathLabel} (phases ${data.summary.phasesExecuted.join(",")})`
        : "";
      renderTabBody(record);
      panel.hidden = false;
      positionHighlight(el);
    }

    function closePanel(): void {
      if (mode !== "showing") return;
      mode = "picking";
      selectedId = null;
      selectedEl = null;
      panel.hidden = true;
      hideHighlight();
    }

    function enterPicking(): void {
      const problem = blockingNotice(page());
      if (problem !== null) {
        showNotice(problem);
        return;
      }
      mode = "picking";
      toggleBtn.setAttribute("aria-pressed", "true");
      host.appendChild(cursorStyle);
      hideNotice();
    }

    function exitToIdle(): void {
      mode = "idle";
      selectedId = null;
      selectedEl = null;
      toggleBtn.setAttribute("aria-pressed", "false");
      if (cursorStyle.parentNode !== null) cursorStyle.remove();
      panel.hidden = true;
      hideHighlight();
      hideNotice();
    }

    function toggle(): void {
      if (mode === "idle") enterPicking();
      else exitToIdle();
    }

    function pickTarget(target: EventTarget | null): void {
      const el = findInstrumented(target);
      if (el !== null) {
        const record = page().records.get((el as HTMLElement).id);
        if (record !== undefined) {
          openPanel(el, record);
          return;
        }
      }
      const failure = failureFor(target);
      if (failure !== null && failure.reason === "bad-schema") {
        showNotice(NOTICE_BAD_SCHEMA);
      } else if (failure !== null) {
        showNotice(`${NOTICE_UNREADABLE} (${failure.reason})`, true);
      } else {
        showNotice(TOOLTIP_NOT_INSTRUMENTED, true);
      }
    }

    function ownEvent(event: Event): boolean {
      // Shadow retargeting makes event.target the host for chrome clicks;
      // composedPath covers engines that surface the inner element instead.
      if (typeof event.composedPath === "function" && event.composedPath().includes(host)) {
        return true;
      }
      const target = event.target;
      return target instanceof Node && (target === host || host.contains(target));
    }

    function onMouseMove(event: MouseEvent): void {
      if (mode !== "picking") return;
      if (ownEvent(event)) return;
      const el = findInstrumented(event.target);
      if (el === null) {
        hideHighlight();
        return;
      }
      hoverEl = el;
      positionHighlight(el);
    }

    function onClick(event: MouseEvent): void {
      if (mode === "idle") return;
      if (ownEvent(event)) return;
      // Picking swallows the page's own click behavior for the picked spot.
      event.preventDefault();
      event.stopImmediatePropagation();
      pickTarget(event.target);
    }

    function onKeyDown(event: KeyboardEvent): void {
      if (event.key !== "Escape" || mode === "idle") return;
      event.preventDefault();
      if (mode === "showing") closePanel();
      else exitToIdle();
    }

    function reposition(): void {
      if (mode === "showing" && selectedEl !== null) positionHighlight(selectedEl);
      else if (mode === "picking" && hoverEl !== null) positionHighlight(hoverEl);
    }

    const observer = new MutationObserver((mutations) => {
      for (const mutation of mutations) {
        const target = mutation.target;
        if (target === host || host.contains(target)) continue;
        dirty = true;
        break;
      }
    });

    toggleBtn.addEventListener("click", toggle);
    (shadow.querySelector(".pt-close") as HTMLElement).addEventListener("click", closePanel);
    shadow.querySelectorAll(".pt-tab").forEach((tab) => {
      tab.addEventListener("click", () => {
        activeTab = tab.getAttribute("data-tab") === "path" ? "path" : "attributes";
        if (selectedId !== null) {
          const record = page().records.get(selectedId);
          if (record !== undefined) renderTabBody(record);
        }
      });
    });
    (shadow.querySelector(".pt-export") as HTMLElement).addEventListener("click", () => {
      if (selectedId === null) return;
      const json = controller.exportReport(selectedId);
      if (json === null) return;
      controller.exports.push(json);
      triggerDownload(doc, `${selectedId}.prov-report.json`, json);
    });

    doc.addEventListener("mousemove", onMouseMove, true);
    doc.addEventListener("click", onClick, true);
    doc.addEventListener("keydown", onKeyDown, true);
    const win = doc.defaultView;
    if (win !== null) {
      win.addEventListener("scroll", reposition, true);
      win.addEventListener("resize", reposition);
    }

    (doc.body ?? doc.documentElement).appendChild(host);
    observer.observe(doc.documentElement, {
      childList: true,
      subtree: true,
      attributes: true,
      characterData: true,
    });

    const controller: OverlayController = {
      host,
      mode: () => mode,
      selected: () => selectedId,
      toggle,
      refresh: () => {
        dirty = true;
        return page();
      },
      exportReport: (componentId: string) => {
        const data = page();
        const record = data.records.get(componentId);
        if (record === undefined) return null;
        return JSON.stringify(buildReport(record, data.summary));
      },
      exports: [],
      deactivate: () => {
        observer.disconnect();
        doc.removeEventListener("mousemove", onMouseMove, true);
        doc.removeEventListener("click", onClick, true);
        doc.removeEventListener("keydown", onKeyDown, true);
        if (win !== null) {
          win.removeEventListener("scroll", reposition, true);
          win.removeEventListener("resize", reposition);
        }
        clearTooltipTimer();
        host.remove();
        mode = "idle";
        if (active === controller) active = null;
        if (api.active === controller) api.active = null;
      },
    };

    const initial = blockingNotice(page());
    if (initial !== null) showNotice(initial);

    active = controller;
    api.active = controller;
    return controller;
  }

  const api = {
    activate,
    active: null as OverlayController | null,
  };
  (globalThis as Record<string, unknown>).__pathtraceOverlay = api;

  const flags = globalThis as Record<string, unknown>;
  if (!flags.__PATHTRACE_NO_AUTO__ && typeof document !== "undefined") {
    const boot = (): void => {
      api.active = activate(document);
    };
    if (document.readyState === "loading") {
      document.addEventListener("DOMContentLoaded", boot, { once: true });
    } else {
      boot();
    }
  }
})();
