// Recorded responses from the live service (seed 77 synthetic archive,
// 60 one-hour videos over two channels). Regenerate against the service
// if the API changes.

import type { ClipsResponse, Meta, QueryResponse } from "../src/types";

export const QUERY_REQUEST = {
  queries: [
    { query: 'tag="female"', color: "#2965cc" },
    { query: 'tag="female" AND channel="CNN"', color: "#d13913" },
  ],
  bucket: "day",
} as const;

export const QUERY_FIXTURE: QueryResponse = {
  "series": [
    {
      "query": "tag=\"female\"",
      "bucket": "day",
      "normalized": false,
      "points": [
        [
          "2017-01-02",
          46200.0
        ],
        [
          "2017-01-03",
          30708.0
        ]
      ],
      "color": "#2965cc"
    },
    {
      "query": "tag=\"female\" AND channel=\"CNN\"",
      "bucket": "day",
      "normalized": false,
      "points": [
        [
          "2017-01-02",
          23100.0
        ],
        [
          "2017-01-03",
          15552.0
        ]
      ],
      "color": "#d13913"
    }
  ],
  "warnings": []
};

export const CLIPS_FIXTURE: ClipsResponse = {
  "clips": [
    {
      "video_id": "video0000",
      "channel": "CNN",
      "show": "CNN Report",
      "air_utc": "2017-01-02T06:00:00Z",
      "start_ms": 24000,
      "end_ms": 60000,
      "snippet": ">> NEWSWORD009 NEWSWORD010 NEWSWORD011 NEWSWORD012 NEWSWORD013 NEWSWORD014 NEWSWORD015 >> NEWSWORD017 NEWSWORD018 NEWSWORD019 NEWSWORD020 NEWSWORD021 NEWSWORD022 NEWSWORD023 >> NEWSWORD025"
    },
    {
      "video_id": "video0000",
      "channel": "CNN",
      "show": "CNN Report",
      "air_utc": "2017-01-02T06:00:00Z",
      "start_ms": 84000,
      "end_ms": 96000,
      "snippet": ">> NEWSWORD033 NEWSWORD034 NEWSWORD035 NEWSWORD036 NEWSWORD037 NEWSWORD038 NEWSWORD039 >>"
    },
    {
      "video_id": "video0000",
      "channel": "CNN",
      "show": "CNN Report",
      "air_utc": "2017-01-02T06:00:00Z",
      "start_ms": 144000,
      "end_ms": 156000,
      "snippet": ">> NEWSWORD057 NEWSWORD058 NEWSWORD059 NEWSWORD060 NEWSWORD061 NEWSWORD062 NEWSWORD063 >>"
    }
  ],
  "page": 0,
  "page_size": 3
};

export const CLIPS_PAGE2_FIXTURE: ClipsResponse = {
  "clips": [
    {
      "video_id": "video0000",
      "channel": "CNN",
      "show": "CNN Report",
      "air_utc": "2017-01-02T06:00:00Z",
      "start_ms": 204000,
      "end_ms": 216000,
      "snippet": ">> NEWSWORD001 NEWSWORD002 NEWSWORD003 NEWSWORD004 NEWSWORD005 NEWSWORD006 NEWSWORD007 >>"
    },
    {
      "video_id": "video0000",
      "channel": "CNN",
      "show": "CNN Report",
      "air_utc": "2017-01-02T06:00:00Z",
      "start_ms": 228000,
      "end_ms": 252000,
      "snippet": "NEWSWORD010 NEWSWORD011 NEWSWORD012 NEWSWORD013 NEWSWORD014 NEWSWORD015 >> NEWSWORD017 NEWSWORD018 NEWSWORD019 NEWSWORD020 NEWSWORD021 NEWSWORD022"
    },
    {
      "video_id": "video0000",
      "channel": "CNN",
      "show": "CNN Report",
      "air_utc": "2017-01-02T06:00:00Z",
      "start_ms": 276000,
      "end_ms": 300000,
      "snippet": "NEWSWORD029 NEWSWORD030 NEWSWORD031 >> NEWSWORD033 NEWSWORD034 NEWSWORD035 NEWSWORD036 NEWSWORD037 NEWSWORD038 NEWSWORD039 >> NEWSWORD041"
    }
  ],
  "page": 1,
  "page_size": 3
};

export const META_FIXTURE: Meta = {
  "snapshot_id": "fixture-snap",
  "channels": [
    "CNN",
    "FOX"
  ],
  "shows": [
    "CNN Report",
    "FOX Report"
  ],
  "people": [],
  "buckets": [
    "day",
    "week",
    "month",
    "year"
  ],
  "date_range": {
    "start": "2017-01-02",
    "end": "2017-01-03"
  }
};

export const PARSE_ERROR_FIXTURE: { status: number; body: { error: string; offset: number } } = {
  "status": 400,
  "body": {
    "error": "unknown key 'bogus' (at offset 17)",
    "offset": 17
  }
};
