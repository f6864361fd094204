"""Canonical result serialization shared by the CLI and the HTTP API.

Both paths must emit bitwise-identical series for identical queries, so
they both go through these functions.
"""

from __future__ import annotations

import json
from dataclasses import asdict

from .engine import Clip, TimeSeries


def series_payload(query: str, series: TimeSeries, color: str | None = None) -> dict:
    payload = {
        "query": query,
        "bucket": series.bucket,
        "normalized": series.normalized is not None,
        "points": [[d, v] for d, v in series.points()],
    }
    if color is not None:
        payload["color"] = color
    return payload


def to_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def series_csv(series: TimeSeries) -> str:
    lines = ["date,value"]
    if series.normalized is not None:
        for d, v in zip(series.dates, series.normalized):
            lines.append(f"{d.isoformat()},{v:.6f}")
    else:
        for d, ms in zip(series.dates, series.values_ms.tolist()):
            lines.append(f"{d.isoformat()},{ms / 1000:.3f}")
    return "\n".join(lines) + "\n"


def clip_payload(clip: Clip) -> dict:
    return asdict(clip)
