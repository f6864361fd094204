// Application wiring: query-line editor, chart, clip panel, URL sync.

import { ApiClient, ApiRequestError } from "./api";
import { renderChart } from "./chart";
import { renderClips } from "./clips";
import {
  bucketRange,
  ChartState,
  decodeState,
  defaultState,
  encodeState,
  nextColor,
  normalizeState,
} from "./state";
import type { BucketUnit, QueryResponse } from "./types";

const CLIP_PAGE_SIZE = 10;

export class App {
  state: ChartState;
  api: ApiClient;
  lastResponse: QueryResponse | null = null;
  private root: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient, initialSearch?: string) {
    this.root = root;
    this.api = api;
    const search = initialSearch ?? window.location.search;
    this.state = search && search !== "?" ? decodeState(search) : defaultState();
    this.renderControls();
  }

  private el<K extends keyof HTMLElementTagNameMap>(tag: K, cls?: string) {
    const node = document.createElement(tag);
    if (cls) node.className = cls;
    return node;
  }

  private section(id: string): HTMLElement {
    let node = this.root.querySelector<HTMLElement>(`#${id}`);
    if (!node) {
      node = this.el("div");
      node.id = id;
      this.root.appendChild(node);
    }
    return node;
  }

  // ------------------------------------------------------------------
  // controls

  renderControls(): void {
    const controls = this.section("controls");
    controls.textContent = "";

    this.state.lines.forEach((line, i) => {
      const row = this.el("div", "query-row");
      const color = this.el("input") as HTMLInputElement;
      color.type = "color";
      color.value = line.color;
      color.addEventListener("change", () => {
        this.state.lines[i] = { ...this.state.lines[i], color: color.value };
        this.state = normalizeState(this.state);
        this.update();
      });
      const input = this.el("input", "query-input") as HTMLInputElement;
      input.type = "text";
      input.value = line.query;
      input.spellcheck = false;
      input.addEventListener("change", () => {
        this.state.lines[i] = { ...this.state.lines[i], query: input.value };
        this.update();
      });
      input.addEventListener("keydown", (ev) => {
        if ((ev as KeyboardEvent).key === "Enter") input.dispatchEvent(new Event("change"));
      });
      const remove = this.el("button") as HTMLButtonElement;
      remove.textContent = "✕";
      remove.title = "Remove query line";
      remove.disabled = this.state.lines.length === 1;
      remove.addEventListener("click", () => {
        this.state.lines.splice(i, 1);
        this.renderControls();
        this.update();
      });
      const error = this.el("pre", "query-error");
      error.dataset.line = String(i);
      error.hidden = true;
      row.append(color, input, remove);
      controls.append(row, error);
    });

    const bar = this.el("div", "control-bar");
    const add = this.el("button") as HTMLButtonElement;
    add.id = "add-line";
    add.textContent = "+ Add query";
    add.addEventListener("click", () => {
      this.state.lines.push({
        query: "",
        color: nextColor(this.state.lines.map((l) => l.color)),
      });
      this.renderControls();
    });

    const bucket = this.el("select") as HTMLSelectElement;
    bucket.id = "bucket";
    for (const unit of ["day", "week", "month", "year"]) {
      const opt = this.el("option") as HTMLOptionElement;
      opt.value = unit;
      opt.textContent = `by ${unit}`;
      bucket.appendChild(opt);
    }
    bucket.value = this.state.bucket;
    bucket.addEventListener("change", () => {
      this.state.bucket = bucket.value as BucketUnit;
      this.update();
    });

    const normalize = this.el("label");
    const normBox = this.el("input") as HTMLInputElement;
    normBox.type = "checkbox";
    normBox.id = "normalize";
    normBox.checked = this.state.normalize;
    normBox.addEventListener("change", () => {
      this.state.normalize = normBox.checked;
      this.update();
    });
    normalize.append(normBox, document.createTextNode(" normalize by news time"));

    const from = this.el("input") as HTMLInputElement;
    from.type = "date";
    from.id = "date-from";
    from.value = this.state.dateFrom ?? "";
    const to = this.el("input") as HTMLInputElement;
    to.type = "date";
    to.id = "date-to";
    to.value = this.state.dateTo ?? "";
    const onRange = () => {
      this.state.dateFrom = from.value || null;
      this.state.dateTo = to.value || null;
      this.update();
    };
    from.addEventListener("change", onRange);
    to.addEventListener("change", onRange);

    bar.append(add, bucket, normalize, from, to);
    controls.appendChild(bar);
  }

  // ------------------------------------------------------------------
  // data flow

  async update(): Promise<void> {
    this.state = normalizeState(this.state);
    this.syncUrl();
    this.clearBanner();
    this.clearQueryErrors();
    let resp: QueryResponse | null;
    try {
      resp = await this.api.runChart(this.state);
    } catch (err) {
      if (err instanceof ApiRequestError && err.offset !== undefined) {
        await this.locateQueryError(err);
      } else {
        this.showBanner(err instanceof Error ? err.message : String(err));
      }
      return;
    }
    if (resp === null) return; // superseded by a newer request
    this.lastResponse = resp;
    if (resp.warnings.length) {
      this.showBanner(resp.warnings.join("; "));
    }
    renderChart(this.section("chart"), resp.series, {
      onPointClick: (line, date) => void this.selectPoint(line, date),
    });
  }

  /** Probe lines one by one to attach the parse error to its input. */
  private async locateQueryError(batchError: ApiRequestError): Promise<void> {
    let located = false;
    for (let i = 0; i < this.state.lines.length; i++) {
      const probe: ChartState = { ...this.state, lines: [this.state.lines[i]] };
      try {
        await this.api.runChart(probe);
      } catch (err) {
        if (err instanceof ApiRequestError && err.offset !== undefined) {
          this.markQueryError(i, this.state.lines[i].query, err);
          located = true;
        }
      }
    }
    if (!located) this.showBanner(batchError.message);
  }

  markQueryError(line: number, query: string, err: ApiRequestError): void {
    const node = this.root.querySelector<HTMLElement>(`.query-error[data-line="${line}"]`);
    if (!node) return;
    const offset = Math.min(err.offset ?? 0, query.length);
    node.hidden = false;
    node.textContent = `${query}\n${" ".repeat(offset)}^ ${err.message}`;
  }

  clearQueryErrors(): void {
    for (const node of this.root.querySelectorAll<HTMLElement>(".query-error")) {
      node.hidden = true;
      node.textContent = "";
    }
  }

  async selectPoint(line: number, date: string, page = 0): Promise<void> {
    this.state.selected = { line, date };
    this.syncUrl();
    const query = this.state.lines[line].query;
    const [from, to] = bucketRange(this.state.bucket, date);
    let resp;
    try {
      resp = await this.api.clips(query, page, CLIP_PAGE_SIZE, from, to);
    } catch (err) {
      this.showBanner(err instanceof Error ? err.message : String(err));
      return;
    }
    renderClips(this.section("clips"), `${query} — ${date}`, resp, {
      onPage: (p) => void this.selectPoint(line, date, p),
    });
  }

  // ------------------------------------------------------------------
  // chrome

  showBanner(message: string): void {
    const banner = this.section("banner");
    banner.className = "banner";
    banner.textContent = message;
    const dismiss = this.el("button");
    dismiss.textContent = "dismiss";
    dismiss.addEventListener("click", () => this.clearBanner());
    banner.appendChild(dismiss);
  }

  clearBanner(): void {
    const banner = this.section("banner");
    banner.className = "banner hidden";
    banner.textContent = "";
  }

  syncUrl(): void {
    const encoded = encodeState(this.state);
    if (typeof history !== "undefined" && history.replaceState) {
      history.replaceState(null, "", `?${encoded}`);
    }
  }
}

export function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const app = new App(root, new ApiClient());
  void app.update();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
