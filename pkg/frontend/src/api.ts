// API client. Responses are used verbatim: the UI never aggregates or
// recomputes values. Stale chart responses are discarded by sequence
// number so rapid edits cannot interleave.

import type { ChartState } from "./state";
import type { ApiError, ClipsResponse, Meta, QueryResponse } from "./types";

export class ApiRequestError extends Error {
  offset?: number;
  status: number;

  constructor(status: number, body: ApiError) {
    super(body.error);
    this.status = status;
    this.offset = body.offset;
  }
}

async function parseError(resp: Response): Promise<ApiRequestError> {
  let body: ApiError = { error: `HTTP ${resp.status}` };
  try {
    body = (await resp.json()) as ApiError;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiRequestError(resp.status, body);
}

export class ApiClient {
  private base: string;
  private chartSeq = 0;

  constructor(base = "") {
    this.base = base;
  }

  async meta(): Promise<Meta> {
    const resp = await fetch(`${this.base}/api/meta`);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as Meta;
  }

  /**
   * Run all chart queries. Resolves to null when a newer request was
   * issued before this one finished (the stale response is dropped).
   */
  async runChart(state: ChartState): Promise<QueryResponse | null> {
    const seq = ++this.chartSeq;
    const body: Record<string, unknown> = {
      queries: state.lines.map((l) => ({ query: l.query, color: l.color })),
      bucket: state.bucket,
      normalize: state.normalize,
    };
    if (state.dateFrom && state.dateTo) {
      body.date_range = { start: state.dateFrom, end: state.dateTo };
    }
    const resp = await fetch(`${this.base}/api/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (seq !== this.chartSeq) return null;
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as QueryResponse;
  }

  async clips(
    query: string,
    page: number,
    pageSize: number,
    dateFrom?: string,
    dateTo?: string,
  ): Promise<ClipsResponse> {
    const params = new URLSearchParams({
      query,
      page: String(page),
      page_size: String(pageSize),
    });
    if (dateFrom) params.set("date_from", dateFrom);
    if (dateTo) params.set("date_to", dateTo);
    const resp = await fetch(`${this.base}/api/clips?${params}`);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as ClipsResponse;
  }
}
