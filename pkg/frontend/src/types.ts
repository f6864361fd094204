// API payload shapes (see the service README for the endpoint contract).

export type BucketUnit = "day" | "week" | "month" | "year";

export interface SeriesPayload {
  query: string;
  bucket: BucketUnit;
  normalized: boolean;
  points: [string, number][]; // [bucket start date, seconds or fraction]
  color?: string;
}

export interface QueryResponse {
  series: SeriesPayload[];
  warnings: string[];
}

export interface ApiError {
  error: string;
  offset?: number;
}

export interface Clip {
  video_id: string;
  channel: string;
  show: string;
  air_utc: string;
  start_ms: number;
  end_ms: number;
  snippet: string;
}

export interface ClipsResponse {
  clips: Clip[];
  page: number;
  page_size: number;
}

export interface Meta {
  snapshot_id: string;
  channels: string[];
  shows: string[];
  people: string[];
  buckets: BucketUnit[];
  date_range: { start: string; end: string } | null;
}
