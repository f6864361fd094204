// Chart state and its URL round-trip: a shared link reconstructs the
// identical state.

import type { BucketUnit } from "./types";

export interface QueryLine {
  query: string;
  color: string;
}

export interface SelectedPoint {
  line: number; // index into lines
  date: string; // bucket start date (ISO)
}

export interface ChartState {
  lines: QueryLine[];
  bucket: BucketUnit;
  normalize: boolean;
  dateFrom: string | null;
  dateTo: string | null;
  selected: SelectedPoint | null;
}

export const PALETTE = [
  "#2965cc",
  "#d13913",
  "#29a634",
  "#8f398f",
  "#d9822b",
  "#00b3a4",
  "#db2c6f",
  "#96622d",
];

export function defaultState(): ChartState {
  return {
    lines: [{ query: 'tag="female"', color: PALETTE[0] }],
    bucket: "month",
    normalize: false,
    dateFrom: null,
    dateTo: null,
    selected: null,
  };
}

export function nextColor(used: string[]): string {
  for (const c of PALETTE) {
    if (!used.includes(c)) return c;
  }
  // ran out of palette: derive a distinct fallback
  return "#" + ((used.length * 2654435761) >>> 8).toString(16).padStart(6, "0").slice(0, 6);
}

/** Enforce the state invariants: at least one line, pairwise-distinct colors. */
export function normalizeState(state: ChartState): ChartState {
  const lines = state.lines.length ? state.lines : defaultState().lines;
  const seen: string[] = [];
  const fixed = lines.map((line) => {
    let color = line.color;
    if (!/^#[0-9a-fA-F]{6}$/.test(color) || seen.includes(color)) {
      color = nextColor(seen);
    }
    seen.push(color);
    return { query: line.query, color };
  });
  return { ...state, lines: fixed };
}

export function encodeState(state: ChartState): string {
  const params = new URLSearchParams();
  state.lines.forEach((line, i) => {
    params.set(`q${i}`, line.query);
    params.set(`c${i}`, line.color);
  });
  params.set("bucket", state.bucket);
  if (state.normalize) params.set("norm", "1");
  if (state.dateFrom) params.set("from", state.dateFrom);
  if (state.dateTo) params.set("to", state.dateTo);
  if (state.selected) params.set("sel", `${state.selected.line}:${state.selected.date}`);
  return params.toString();
}

export function decodeState(search: string): ChartState {
  const params = new URLSearchParams(search);
  const lines: QueryLine[] = [];
  for (let i = 0; params.has(`q${i}`); i++) {
    lines.push({ query: params.get(`q${i}`)!, color: params.get(`c${i}`) ?? "" });
  }
  const bucket = (params.get("bucket") ?? "month") as BucketUnit;
  let selected: SelectedPoint | null = null;
  const sel = params.get("sel");
  if (sel) {
    const idx = sel.indexOf(":");
    const line = Number(sel.slice(0, idx));
    if (Number.isInteger(line) && line >= 0 && line < lines.length) {
      selected = { line, date: sel.slice(idx + 1) };
    }
  }
  return normalizeState({
    lines,
    bucket: ["day", "week", "month", "year"].includes(bucket) ? bucket : "month",
    normalize: params.get("norm") === "1",
    dateFrom: params.get("from"),
    dateTo: params.get("to"),
    selected,
  });
}

/** Inclusive date range covered by one bucket (for clip inspection). */
export function bucketRange(bucket: BucketUnit, startDate: string): [string, string] {
  const [y, m, d] = startDate.split("-").map(Number);
  const start = new Date(Date.UTC(y, m - 1, d));
  const end = new Date(start);
  if (bucket === "day") {
    // single day
  } else if (bucket === "week") {
    end.setUTCDate(end.getUTCDate() + 6);
  } else if (bucket === "month") {
    end.setUTCMonth(end.getUTCMonth() + 1);
    end.setUTCDate(end.getUTCDate() - 1);
  } else {
    end.setUTCFullYear(end.getUTCFullYear() + 1);
    end.setUTCDate(end.getUTCDate() - 1);
  }
  return [startDate, end.toISOString().slice(0, 10)];
}
