/**
 * Shared plumbing for the overlay tests: typed access to the script's
 * global API, page setup inside the jsdom document, marker builders that
 * mirror the server's emit format, and event dispatch shorthands.
 */

export interface AttributeEvent {
  name: string;
  value: string;
  by: string;
  line: number;
}

export interface ServerPathEntry {
  unit: string;
  method: string;
  phase: number;
}

export interface ProvRecord {
  componentId: string;
  typePath: string;
  tag: string | null;
  source: { file: string; line: number; column: number } | null;
  attributeEvents: AttributeEvent[];
  serverPath: ServerPathEntry[];
  requestId: string;
  sessionId: string | null;
}

export interface PageData {
  records: Map<string, ProvRecord>;
  summary: { requestId: string; phasesExecuted: number[]; pathLabel: string } | null;
  failures: { index: number; componentId: string | null; reason: string }[];
  markerCount: number;
}

export interface OverlayController {
  host: HTMLElement;
  mode(): "idle" | "picking" | "showing";
  selected(): string | null;
  toggle(): void;
  refresh(): PageData;
  exportReport(componentId: string): string | null;
  exports: string[];
  deactivate(): void;
}

export interface OverlayApi {
  activate(doc?: Document): OverlayController;
  active: OverlayController | null;
}

/** Load the overlay script with auto-activation disabled. */
export async function loadOverlayApi(): Promise<OverlayApi> {
  (globalThis as Record<string, unknown>).__PATHTRACE_NO_AUTO__ = true;
  // The overlay is a classic script, not a module; the import is only for
  // its side effect of installing the global api.
  // @ts-ignore TS2306
  await import("../src/overlay");
  return (globalThis as Record<string, unknown>).__pathtraceOverlay as OverlayApi;
}

/** Replace the test document's content with a full fixture page. */
export function loadPage(html: string): void {
  const parsed = new DOMParser().parseFromString(html, "text/html");
  document.head.innerHTML = parsed.head.innerHTML;
  document.body.innerHTML = parsed.body.innerHTML;
}

export function loadBody(inner: string): void {
  document.head.innerHTML = "<title>test</title>";
  document.body.innerHTML = inner;
}

/** The page as the server produced it: everything minus overlay chrome. */
export function serializeSansOverlay(): string {
  const clone = document.documentElement.cloneNode(true) as HTMLElement;
  clone.querySelector("#pathtrace-overlay")?.remove();
  return clone.outerHTML;
}

export function encodePayload(data: unknown): string {
  const bytes = new TextEncoder().encode(JSON.stringify(data));
  let binary = "";
  for (const byte of bytes) binary += String.fromCharCode(byte);
  return btoa(binary).replace(/\+/g, "-").replace(/\//g, "_");
}

export function metaMarker(componentId: string, payload: string): string {
  return `<input type="hidden" class="prov-meta" data-for="${componentId}" value="${payload}"/>`;
}

export function summaryMarker(payload: string): string {
  return `<input type="hidden" class="prov-summary" value="${payload}"/>`;
}

export function recordDict(
  overrides: Record<string, unknown> = {},
): Record<string, unknown> {
  return {
    schema: "prov/1",
    component_id: "c1",
    type_path: "demo.component.html.InputText",
    tag: "ui:inputText",
    source: { file: "page.xhtml", line: 3, column: 1 },
    attribute_events: [
      { name: "id", value: "c1", by: "pathtrace.aop.ComponentAdvice", line: 3 },
    ],
    server_path: [
      { unit: "demo.taglib.InputTextTag", method: "createComponent", phase: 1 },
    ],
    request_id: "t000001",
    session_id: "0123456789abcdef",
    ...overrides,
  };
}

export function summaryDict(
  overrides: Record<string, unknown> = {},
): Record<string, unknown> {
  return {
    schema: "prov/1",
    request_id: "t000001",
    phases_executed: [1, 6],
    path_label: "GET-initial",
    ...overrides,
  };
}

export function click(el: Element): MouseEvent {
  const event = new MouseEvent("click", { bubbles: true, cancelable: true, composed: true });
  el.dispatchEvent(event);
  return event;
}

export function hover(el: Element): void {
  el.dispatchEvent(new MouseEvent("mousemove", { bubbles: true, composed: true }));
}

export function pressEscape(): void {
  document.dispatchEvent(
    new KeyboardEvent("keydown", { key: "Escape", cancelable: true }),
  );
}

/** One macrotask, enough for MutationObserver delivery. */
export function tick(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export function shadowOf(controller: OverlayController): ShadowRoot {
  const root = controller.host.shadowRoot;
  if (root === null) throw new Error("overlay host has no shadow root");
  return root;
}

export function tableRows(root: ShadowRoot): string[][] {
  const rows: string[][] = [];
  root.querySelectorAll(".pt-tab-body tr").forEach((tr) => {
    const cells = tr.querySelectorAll("td");
    if (cells.length === 0) return;
    rows.push([...cells].map((td) => td.textContent ?? ""));
  });
  return rows;
}
