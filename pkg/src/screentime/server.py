"""HTTP API over a hot-swappable archive snapshot.

Handlers read the snapshot reference exactly once per request, so a
concurrent snapshot swap never interleaves data from two snapshots
within one response. All state is the immutable Archive.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .archive import Archive
from .config import ServiceConfig
from .engine import BUCKET_UNITS, Engine
from .errors import MalformedInputError, QuerySyntaxError, UnknownVideoError
from .ingest import load_snapshot
from .render import clip_payload, series_payload


class SnapshotHolder:
    """Atomic reference to (archive, engine, snapshot id)."""

    def __init__(self, archive: Archive, snapshot_id: str):
        self._ref = (archive, Engine(archive), snapshot_id)

    def get(self) -> tuple[Archive, Engine, str]:
        return self._ref

    def swap(self, archive: Archive, snapshot_id: str) -> None:
        self._ref = (archive, Engine(archive), snapshot_id)


def _error(status: int, message: str, offset: int | None = None) -> JSONResponse:
    body = {"error": message}
    if offset is not None:
        body["offset"] = offset
    return JSONResponse(body, status_code=status)


def _parse_date_range(rng) -> tuple[date, date] | None:
    if not rng:
        return None
    try:
        return date.fromisoformat(rng["start"]), date.fromisoformat(rng["end"])
    except (KeyError, TypeError, ValueError):
        raise MalformedInputError("date_range must be {start, end} ISO dates") from None


def create_app(holder: SnapshotHolder, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="screentime", version=__version__)

    @app.exception_handler(QuerySyntaxError)
    async def _syntax(_req: Request, exc: QuerySyntaxError):
        return _error(400, str(exc), exc.offset)

    @app.exception_handler(MalformedInputError)
    async def _malformed(_req: Request, exc: MalformedInputError):
        return _error(400, str(exc))

    @app.exception_handler(UnknownVideoError)
    async def _unknown(_req: Request, exc: UnknownVideoError):
        return _error(404, f"unknown video {exc}")

    @app.get("/api/health")
    def health():
        archive, _, snapshot_id = holder.get()
        return {
            "status": "ok",
            "snapshot_id": snapshot_id,
            "version": __version__,
            "videos": len(archive.videos),
        }

    @app.get("/api/meta")
    def meta():
        archive, _, snapshot_id = holder.get()
        rng = archive.date_range()
        return {
            "snapshot_id": snapshot_id,
            "channels": archive.channels,
            "shows": archive.shows,
            "people": sorted(archive.identity_names),
            "buckets": list(BUCKET_UNITS),
            "date_range": (
                {"start": rng[0].isoformat(), "end": rng[1].isoformat()} if rng else None
            ),
        }

    @app.post("/api/query")
    async def query(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("queries"), list):
            return _error(400, "body must carry a queries list")
        bucket = body.get("bucket", config.bucket)
        if bucket not in BUCKET_UNITS:
            return _error(400, f"bucket must be one of {', '.join(BUCKET_UNITS)}")
        normalize = bool(body.get("normalize", config.normalize))
        date_range = _parse_date_range(body.get("date_range"))
        _, engine, _ = holder.get()
        series_out = []
        warnings: list[str] = []
        for item in body["queries"]:
            if not isinstance(item, dict) or "query" not in item:
                return _error(400, "each query item needs a query string")
            series, warns = engine.run(
                item["query"], bucket=bucket, normalize=normalize, date_range=date_range
            )
            warnings.extend(warns)
            series_out.append(
                series_payload(item["query"], series, color=item.get("color"))
            )
        return {"series": series_out, "warnings": warnings}

    @app.get("/api/clips")
    def clips(
        query: str,
        page: int = 0,
        page_size: int = 25,
        date_from: str | None = None,
        date_to: str | None = None,
    ):
        _, engine, _ = holder.get()
        date_range = None
        if date_from or date_to:
            try:
                date_range = (
                    date.fromisoformat(date_from or date_to),
                    date.fromisoformat(date_to or date_from),
                )
            except ValueError:
                raise MalformedInputError("date_from/date_to must be ISO dates") from None
        out = engine.clips(query, page=page, page_size=page_size, date_range=date_range)
        return {"clips": [clip_payload(c) for c in out], "page": page, "page_size": page_size}

    @app.post("/api/reload")
    def reload(body: dict):
        path = body.get("snapshot") if isinstance(body, dict) else None
        if not path:
            return _error(400, "body must carry a snapshot path")
        archive, snapshot_id = load_snapshot(path)
        holder.swap(archive, snapshot_id)
        return {"status": "ok", "snapshot_id": snapshot_id}

    if config.ui_dir and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
