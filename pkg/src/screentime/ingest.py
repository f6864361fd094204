"""File ingestion and snapshot serialization.

Input is a directory of newline-delimited UTF-8 record files
(videos.jsonl, faces.jsonl, tokens.jsonl, luminance.jsonl,
descriptors.bin + descriptors.meta, persons.csv); absent files are
treated as empty streams. Schema violations raise SchemaError with the
offending file and line number.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import pickle
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

import numpy as np

from .archive import Archive, Person, RawRecords, VideoMeta
from .errors import SchemaError

SNAPSHOT_FORMAT = "screentime-snapshot"
SNAPSHOT_VERSION = 1

HAIR_COLORS = {"blonde", "brown", "black", "other"}


@dataclass
class IngestReport:
    counts: dict = field(default_factory=dict)
    videos_without_captions: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def render(self) -> str:
        lines = ["ingest report"]
        for k, v in self.counts.items():
            lines.append(f"  {k}: {v}")
        if self.videos_without_captions:
            lines.append(
                f"  videos without captions (excluded from commercial masking): "
                f"{len(self.videos_without_captions)}"
            )
            for vid in self.videos_without_captions[:20]:
                lines.append(f"    {vid}")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        return "\n".join(lines)


def parse_rfc3339(value: str) -> datetime:
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def parse_birthdate(value: str) -> date:
    text = value.strip()
    if len(text) == 4 and text.isdigit():
        return date(int(text), 1, 1)  # year-only resolves to January 1
    return date.fromisoformat(text)


def _jsonl(path: Path):
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", str(path), lineno) from None


def _require(record: dict, key: str, path: Path, lineno: int):
    if key not in record:
        raise SchemaError(f"missing field {key!r}", str(path), lineno)
    return record[key]


def load_records(data_dir: str | Path) -> RawRecords:
    """Parse a data directory into validated columnar records."""
    data_dir = Path(data_dir)
    raw = RawRecords()

    # --- videos ---------------------------------------------------------
    video_index: dict[str, int] = {}
    seen_airing: set[tuple] = set()
    vpath = data_dir / "videos.jsonl"
    if vpath.exists():
        for lineno, rec in _jsonl(vpath):
            vid = _require(rec, "id", vpath, lineno)
            channel = _require(rec, "channel", vpath, lineno)
            show = _require(rec, "show", vpath, lineno)
            try:
                air = parse_rfc3339(_require(rec, "air_utc", vpath, lineno))
            except ValueError:
                raise SchemaError("invalid air_utc timestamp", str(vpath), lineno) from None
            duration = _require(rec, "duration_ms", vpath, lineno)
            if not isinstance(duration, int) or duration <= 0:
                raise SchemaError("duration_ms must be a positive integer", str(vpath), lineno)
            if vid in video_index:
                raise SchemaError(f"duplicate video id {vid!r}", str(vpath), lineno)
            airing = (channel, show, air)
            if airing in seen_airing:
                raise SchemaError(
                    f"duplicate (channel, show, air_utc) airing {airing!r}", str(vpath), lineno
                )
            seen_airing.add(airing)
            video_index[vid] = len(raw.videos)
            raw.videos.append(VideoMeta(vid, channel, show, air, duration))

    durations = {v.id: v.duration_ms for v in raw.videos}

    # --- faces ----------------------------------------------------------
    fpath = data_dir / "faces.jsonl"
    identity_index: dict[str, int] = {}
    identity_names: list[str] = []
    if fpath.exists():
        f_video, f_t, f_bbox = [], [], []
        f_gender, f_gscore, f_ident, f_iscore, f_desc = [], [], [], [], []
        for lineno, rec in _jsonl(fpath):
            vid = _require(rec, "video_id", fpath, lineno)
            if vid not in video_index:
                raise SchemaError(f"dangling video_id {vid!r}", str(fpath), lineno)
            t = _require(rec, "t_ms", fpath, lineno)
            if not isinstance(t, int) or t < 0 or t >= durations[vid]:
                raise SchemaError("t_ms out of video bounds", str(fpath), lineno)
            bbox = _require(rec, "bbox", fpath, lineno)
            if (
                not isinstance(bbox, list)
                or len(bbox) != 4
                or not all(isinstance(x, (int, float)) for x in bbox)
                or not (0 <= bbox[0] < bbox[2] <= 1 and 0 <= bbox[1] < bbox[3] <= 1)
            ):
                raise SchemaError("bbox must be normalized [x0,y0,x1,y1]", str(fpath), lineno)
            gender = _require(rec, "gender", fpath, lineno)
            glabel = gender.get("label") if isinstance(gender, dict) else None
            gscore = gender.get("score", 1.0) if isinstance(gender, dict) else None
            if glabel not in ("male", "female") or not (0 <= gscore <= 1):
                raise SchemaError("gender must be {label: male|female, score in [0,1]}", str(fpath), lineno)
            ident = rec.get("identity")
            ident_id, ident_score = -1, 0.0
            if ident is not None:
                name = ident.get("name") if isinstance(ident, dict) else None
                if not name:
                    raise SchemaError("identity must carry a name", str(fpath), lineno)
                ident_score = float(ident.get("score", 1.0))
                key = name.lower()
                if key not in identity_index:
                    identity_index[key] = len(identity_names)
                    identity_names.append(name)
                ident_id = identity_index[key]
            desc = rec.get("descriptor_idx", -1)
            if not isinstance(desc, int) or desc < -1:
                raise SchemaError("descriptor_idx must be a non-negative integer", str(fpath), lineno)
            f_video.append(video_index[vid])
            f_t.append(t)
            f_bbox.append(bbox)
            f_gender.append(0 if glabel == "male" else 1)
            f_gscore.append(gscore)
            f_ident.append(ident_id)
            f_iscore.append(ident_score)
            f_desc.append(desc)
        raw.face_video = np.array(f_video, dtype=np.int32)
        raw.face_t = np.array(f_t, dtype=np.int64)
        raw.face_bbox = np.array(f_bbox, dtype=np.float32).reshape(-1, 4)
        raw.face_gender = np.array(f_gender, dtype=np.int8)
        raw.face_gender_score = np.array(f_gscore, dtype=np.float32)
        raw.face_identity = np.array(f_ident, dtype=np.int32)
        raw.face_identity_score = np.array(f_iscore, dtype=np.float32)
        raw.face_desc = np.array(f_desc, dtype=np.int32)
    raw.identity_names = identity_names

    # --- tokens ---------------------------------------------------------
    tpath = data_dir / "tokens.jsonl"
    if tpath.exists():
        t_video, t_seq, t_t0, t_t1, t_text = [], [], [], [], []
        last_seq: dict[int, int] = {}
        for lineno, rec in _jsonl(tpath):
            vid = _require(rec, "video_id", tpath, lineno)
            if vid not in video_index:
                raise SchemaError(f"dangling video_id {vid!r}", str(tpath), lineno)
            seq = _require(rec, "seq", tpath, lineno)
            text = _require(rec, "text", tpath, lineno)
            t0 = _require(rec, "t0_ms", tpath, lineno)
            t1 = _require(rec, "t1_ms", tpath, lineno)
            if not isinstance(seq, int):
                raise SchemaError("seq must be an integer", str(tpath), lineno)
            if not isinstance(text, str):
                raise SchemaError("text must be a string", str(tpath), lineno)
            if not (isinstance(t0, int) and isinstance(t1, int) and 0 <= t0 <= t1):
                raise SchemaError("need 0 <= t0_ms <= t1_ms", str(tpath), lineno)
            vi = video_index[vid]
            if vi in last_seq and seq <= last_seq[vi]:
                raise SchemaError(
                    f"non-monotone token seq {seq} for video {vid!r}", str(tpath), lineno
                )
            last_seq[vi] = seq
            t_video.append(vi)
            t_seq.append(seq)
            t_t0.append(t0)
            t_t1.append(t1)
            t_text.append(text)
        raw.tok_video = np.array(t_video, dtype=np.int32)
        raw.tok_seq = np.array(t_seq, dtype=np.int64)
        raw.tok_t0 = np.array(t_t0, dtype=np.int64)
        raw.tok_t1 = np.array(t_t1, dtype=np.int64)
        raw.tok_texts = t_text

    # --- luminance ------------------------------------------------------
    lpath = data_dir / "luminance.jsonl"
    if lpath.exists():
        l_video, l_t, l_value = [], [], []
        last_t: dict[int, int] = {}
        for lineno, rec in _jsonl(lpath):
            vid = _require(rec, "video_id", lpath, lineno)
            if vid not in video_index:
                raise SchemaError(f"dangling video_id {vid!r}", str(lpath), lineno)
            t = _require(rec, "t_ms", lpath, lineno)
            value = _require(rec, "value", lpath, lineno)
            if not isinstance(t, int) or t < 0:
                raise SchemaError("t_ms must be a non-negative integer", str(lpath), lineno)
            if not isinstance(value, (int, float)) or not (0 <= value <= 1):
                raise SchemaError("value must lie in [0,1]", str(lpath), lineno)
            vi = video_index[vid]
            if vi in last_t and t < last_t[vi]:
                raise SchemaError("luminance samples out of time order", str(lpath), lineno)
            last_t[vi] = t
            l_video.append(vi)
            l_t.append(t)
            l_value.append(value)
        raw.lum_video = np.array(l_video, dtype=np.int32)
        raw.lum_t = np.array(l_t, dtype=np.int64)
        raw.lum_value = np.array(l_value, dtype=np.float32)

    # --- descriptors ------------------------------------------------------
    dpath = data_dir / "descriptors.bin"
    mpath = data_dir / "descriptors.meta"
    if dpath.exists():
        if not mpath.exists():
            raise SchemaError("descriptors.bin present without descriptors.meta", str(mpath))
        try:
            count = int(mpath.read_text().strip())
        except ValueError:
            raise SchemaError("descriptors.meta must hold an integer count", str(mpath), 1) from None
        blob = np.fromfile(dpath, dtype="<f4")
        if len(blob) != count * 128:
            raise SchemaError(
                f"descriptors.bin holds {len(blob)} floats, expected {count * 128}", str(dpath)
            )
        desc = blob.reshape(count, 128)
        if not np.isfinite(desc).all():
            raise SchemaError("descriptors must be finite", str(dpath))
        raw.descriptors = desc
    if len(raw.face_desc) and raw.face_desc.max(initial=-1) >= 0:
        n_desc = 0 if raw.descriptors is None else len(raw.descriptors)
        if raw.face_desc.max() >= n_desc:
            raise SchemaError(
                f"descriptor_idx {int(raw.face_desc.max())} out of range ({n_desc} descriptors)",
                str(fpath),
            )

    # --- persons ----------------------------------------------------------
    ppath = data_dir / "persons.csv"
    if ppath.exists():
        with ppath.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            expected = ["name", "presenter_channels", "gender", "birthdate", "hair_color"]
            if reader.fieldnames != expected:
                raise SchemaError(
                    f"persons.csv header must be {','.join(expected)}", str(ppath), 1
                )
            seen = set()
            for lineno, row in enumerate(reader, start=2):
                name = (row["name"] or "").strip()
                if not name:
                    raise SchemaError("person name required", str(ppath), lineno)
                if name.lower() in seen:
                    raise SchemaError(f"duplicate person {name!r}", str(ppath), lineno)
                seen.add(name.lower())
                channels = frozenset(
                    c.strip() for c in (row["presenter_channels"] or "").split(";") if c.strip()
                )
                gender = (row["gender"] or "").strip().lower()
                if gender not in ("male", "female"):
                    raise SchemaError("gender must be male or female", str(ppath), lineno)
                bd_text = (row["birthdate"] or "").strip()
                try:
                    birthdate = parse_birthdate(bd_text) if bd_text else None
                except ValueError:
                    raise SchemaError("invalid birthdate", str(ppath), lineno) from None
                hair = (row["hair_color"] or "").strip().lower() or None
                if hair is not None and hair not in HAIR_COLORS:
                    raise SchemaError(
                        f"hair_color must be one of {sorted(HAIR_COLORS)}", str(ppath), lineno
                    )
                raw.persons.append(Person(name, channels, gender, birthdate, hair))

    return raw


def ingest(data_dir: str | Path, **build_kwargs) -> tuple[Archive, IngestReport]:
    """Parse, validate, and index a data directory."""
    raw = load_records(data_dir)
    archive = Archive.build(raw, **build_kwargs)
    report = IngestReport(counts=archive.counts())
    report.videos_without_captions = [
        v.id for v, known in zip(archive.videos, archive.mask_known) if not known
    ]
    return archive, report


# ----------------------------------------------------------------------
# snapshots


def save_snapshot(archive: Archive, path: str | Path) -> str:
    """Serialize an archive; returns the snapshot id (content hash)."""
    payload = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "archive": archive,
    }
    buf = io.BytesIO()
    pickle.dump(payload, buf, protocol=pickle.HIGHEST_PROTOCOL)
    data = buf.getvalue()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()[:16]


def load_snapshot(path: str | Path) -> tuple[Archive, str]:
    """Load an archive snapshot; returns (archive, snapshot id)."""
    data = Path(path).read_bytes()
    payload = pickle.loads(data)
    if not isinstance(payload, dict) or payload.get("format") != SNAPSHOT_FORMAT:
        raise SchemaError(f"not a {SNAPSHOT_FORMAT} file", str(path))
    if payload.get("version") != SNAPSHOT_VERSION:
        raise SchemaError(f"unsupported snapshot version {payload.get('version')}", str(path))
    return payload["archive"], hashlib.sha256(data).hexdigest()[:16]
