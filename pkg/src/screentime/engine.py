"""Query evaluation, time-series aggregation, and clip listing.

Filters evaluate to canonical interval arrays on the archive's global
timeline; AND intersects, OR unions. Results are commercial-masked by
default (videos without a mask are excluded unless commercials=include).
Aggregation splits intervals at day boundaries arithmetically (the
global axis is day-aligned) and rolls days up to the requested bucket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from . import _kernels as K
from .archive import DAY_MS, Archive, Flat, empty_flat, flat_intersect, flat_union
from .errors import MalformedInputError
from .intervals import IntervalSet
from .qlang import AndGroup, Query, parse, parse_hour_range

BUCKET_UNITS = ("day", "week", "month", "year")

_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()


def day_to_date(day: int) -> date:
    return date.fromordinal(_EPOCH_ORDINAL + day)


def date_to_day(d: date) -> int:
    return d.toordinal() - _EPOCH_ORDINAL


@dataclass
class TimeSeries:
    bucket: str
    dates: list[date]
    values_ms: np.ndarray
    normalized: list[float] | None = None

    @property
    def seconds(self) -> list[float]:
        return [ms / 1000.0 for ms in self.values_ms.tolist()]

    def values(self) -> list[float]:
        return self.normalized if self.normalized is not None else self.seconds

    def points(self) -> list[tuple[str, float]]:
        return [(d.isoformat(), v) for d, v in zip(self.dates, self.values())]

    def total_ms(self) -> int:
        return int(self.values_ms.sum())


@dataclass
class Clip:
    video_id: str
    channel: str
    show: str
    air_utc: str
    start_ms: int
    end_ms: int
    snippet: str


@dataclass
class EvalResult:
    flat: Flat
    warnings: list[str] = field(default_factory=list)


class Engine:
    """Stateless query executor over one immutable Archive snapshot."""

    def __init__(self, archive: Archive):
        self.archive = archive
        self._hour_cache: dict[tuple[int, int], Flat] = {}
        self._span_cache: dict = {}
        self._news_day_cache: tuple[np.ndarray, np.ndarray] | None = None

    # ------------------------------------------------------------------
    # evaluation

    def evaluate(self, query: Query | str) -> EvalResult:
        if isinstance(query, str):
            query = parse(query)
        warnings: list[str] = []
        result = empty_flat()
        for group in query.groups:
            result = flat_union(result, self._eval_group(group, warnings))
        return EvalResult(result, warnings)

    def evaluate_by_video(self, query: Query | str) -> dict[str, IntervalSet]:
        """Per-video interval sets (local milliseconds); empty sets omitted."""
        res = self.evaluate(query)
        out: dict[str, IntervalSet] = {}
        if not len(res.flat.starts):
            return out
        ar = self.archive
        vids = ar.video_of_global(res.flat.starts)
        bounds = np.searchsorted(vids, np.arange(len(ar.videos) + 1))
        for vi in range(len(ar.videos)):
            a, b = bounds[vi], bounds[vi + 1]
            if a == b:
                continue
            lo = ar.origin[vi]
            out[ar.videos[vi].id] = IntervalSet._from_arrays(
                ar.videos[vi].id, res.flat.starts[a:b] - lo, res.flat.ends[a:b] - lo
            )
        return out

    def _eval_group(self, group: AndGroup, warnings: list[str]) -> Flat:
        ar = self.archive
        include_commercials = any(
            f.value.lower() == "include" for f in group.find("commercials")
        )
        window_ms = 0
        for f in group.find("textwindow"):
            window_ms = int(float(f.value) * 1000)
        flats: list[Flat] = []
        for f in group.filters:
            if f.key in ("commercials", "textwindow"):
                continue
            flats.append(self._eval_leaf(f.key, f.value, window_ms, warnings))
        if not flats:
            result = self._all_spans()
        else:
            flats.sort(key=lambda fl: len(fl.starts))
            result = flats[0]
            for fl in flats[1:]:
                if not len(result.starts):
                    break
                result = flat_intersect(result, fl)
        if not include_commercials:
            result = flat_intersect(result, ar.news_flat)
        return result

    def _eval_leaf(self, key: str, value: str, window_ms: int, warnings: list[str]) -> Flat:
        ar = self.archive
        if key == "tag":
            tag = value.lower()
            if tag == "presenter":
                return ar.presenter_flat
            return ar.gender_flat[tag]
        if key == "name":
            out = empty_flat()
            for name in _alternatives(value):
                ident = ar.identity_id(name)
                if ident is None or ident not in ar.identity_flat:
                    warnings.append(f"unknown person {name!r}")
                    continue
                out = flat_union(out, ar.identity_flat[ident])
            return out
        if key == "channel":
            return self._meta_spans("channel", value)
        if key == "show":
            return self._meta_spans("show", value)
        if key == "hour":
            return self._hour_spans(parse_hour_range(value))
        if key == "text":
            out = empty_flat()
            for phrase in _alternatives(value):
                out = flat_union(out, self._text_flat(phrase, window_ms))
            return out
        raise MalformedInputError(f"unknown filter key {key!r}")

    def _all_spans(self) -> Flat:
        key = ("all",)
        if key not in self._span_cache:
            ar = self.archive
            self._span_cache[key] = Flat(
                ar.origin.copy(), ar.origin + ar.duration_ms
            )
        return self._span_cache[key]

    def _meta_spans(self, field_name: str, value: str) -> Flat:
        wanted = {v.lower() for v in _alternatives(value)}
        key = (field_name, tuple(sorted(wanted)))
        if key not in self._span_cache:
            ar = self.archive
            sel = np.array(
                [getattr(v, field_name).lower() in wanted for v in ar.videos], dtype=bool
            )
            self._span_cache[key] = Flat(
                ar.origin[sel].copy(), (ar.origin + ar.duration_ms)[sel]
            )
        return self._span_cache[key]

    def _hour_spans(self, hours: tuple[int, int]) -> Flat:
        if hours in self._hour_cache:
            return self._hour_cache[hours]
        ar = self.archive
        h1, h2 = hours
        windows: list[tuple[int, int]] = []
        if h1 < h2:
            windows.append((h1 * 3_600_000, h2 * 3_600_000))
        else:  # wraps midnight
            windows.append((0, h2 * 3_600_000))
            windows.append((h1 * 3_600_000, DAY_MS))
        starts: list[int] = []
        ends: list[int] = []
        for vi in range(len(ar.videos)):
            v_lo = int(ar.origin[vi])
            v_hi = v_lo + int(ar.duration_ms[vi])
            slot0 = v_lo // DAY_MS
            slot1 = (v_hi - 1) // DAY_MS
            for slot in range(slot0, slot1 + 1):
                base = slot * DAY_MS
                for w0, w1 in windows:
                    s = max(v_lo, base + w0)
                    e = min(v_hi, base + w1)
                    if s < e:
                        starts.append(s)
                        ends.append(e)
        arr_s = np.array(starts, dtype=np.int64)
        arr_e = np.array(ends, dtype=np.int64)
        order = np.argsort(arr_s, kind="stable")
        flat = Flat(*K.merge_touching(arr_s[order], arr_e[order]))
        self._hour_cache[hours] = flat
        return flat

    # ------------------------------------------------------------------
    # phrase matching

    def phrase_positions(self, phrase: str) -> np.ndarray:
        """Global token positions where the phrase starts (unordered filter,
        positions ascending). Matching is case-insensitive and uses token
        adjacency in per-video sequence order."""
        ar = self.archive
        words = phrase.upper().split()
        if not words:
            return np.empty(0, dtype=np.int64)
        ids = [ar.vocab.get(w) for w in words]
        if any(i is None for i in ids):
            return np.empty(0, dtype=np.int64)
        lo, hi = ar.postings_bounds[ids[0]], ar.postings_bounds[ids[0] + 1]
        pos = ar.postings_pos[lo:hi].astype(np.int64)
        n_tok = len(ar.tok_id)
        keep = np.ones(len(pos), dtype=bool)
        for k, wid in enumerate(ids[1:], start=1):
            nxt = pos + k
            inside = nxt < n_tok
            keep &= inside
            keep &= ar.tok_id[np.minimum(nxt, n_tok - 1)] == wid
        pos = pos[keep]
        if len(words) > 1 and len(pos):
            v0 = np.searchsorted(ar.tok_offsets, pos, side="right")
            v1 = np.searchsorted(ar.tok_offsets, pos + (len(words) - 1), side="right")
            pos = pos[v0 == v1]
        return pos

    def phrase_intervals(self, phrase: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(positions, global starts, global ends) of each phrase match."""
        ar = self.archive
        pos = self.phrase_positions(phrase)
        n = len(phrase.upper().split())
        if not len(pos):
            empty = np.empty(0, dtype=np.int64)
            return pos, empty, empty
        vids = np.searchsorted(ar.tok_offsets, pos, side="right") - 1
        starts = ar.origin[vids] + ar.tok_t0[pos]
        ends = ar.origin[vids] + ar.tok_t1[pos + (n - 1)]
        ends = np.maximum(ends, starts)  # alignment jitter can invert spans
        return pos, starts, ends

    def _text_flat(self, phrase: str, window_ms: int) -> Flat:
        ar = self.archive
        pos, starts, ends = self.phrase_intervals(phrase)
        if not len(starts):
            return empty_flat()
        if window_ms > 0:
            vids = np.searchsorted(ar.tok_offsets, pos, side="right") - 1
            mid = (starts + ends) // 2
            half = window_ms // 2
            v_lo = ar.origin[vids]
            v_hi = v_lo + ar.duration_ms[vids]
            starts = np.maximum(mid - half, v_lo)
            ends = np.minimum(mid + (window_ms - half), v_hi)
            keep = ends > starts
            starts, ends = starts[keep], ends[keep]
        if len(starts) > 1 and not np.all(starts[1:] >= starts[:-1]):
            order = np.argsort(starts, kind="stable")
            starts, ends = starts[order], ends[order]
        return Flat(*K.merge_touching(starts, ends))

    # ------------------------------------------------------------------
    # aggregation

    def day_series(self, flat: Flat) -> tuple[np.ndarray, np.ndarray]:
        """(epoch days, ms per day), days ascending, only nonzero days."""
        ar = self.archive
        starts, ends = flat.starts, flat.ends
        if not len(starts):
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        n_inside = (ends - 1) // DAY_MS - starts // DAY_MS
        crossing = n_inside > 0
        if crossing.any():
            plain_s, plain_e = starts[~crossing], ends[~crossing]
            cs, ce = starts[crossing], ends[crossing]
            reps = (n_inside[crossing] + 1).astype(np.int64)
            total = int(reps.sum())
            row = np.repeat(np.arange(len(cs)), reps)
            offsets = np.concatenate(([0], np.cumsum(reps)[:-1]))
            k = np.arange(total) - offsets[row]
            piece_s = np.maximum(cs[row], (cs[row] // DAY_MS + k) * DAY_MS)
            piece_e = np.minimum(ce[row], (cs[row] // DAY_MS + k + 1) * DAY_MS)
            starts = np.concatenate((plain_s, piece_s))
            ends = np.concatenate((plain_e, piece_e))
        slots = starts // DAY_MS
        days = ar.day_of_slot[slots]
        lengths = (ends - starts).astype(np.float64)
        day_min = int(days.min())
        acc = np.bincount(days - day_min, weights=lengths)
        nz = np.flatnonzero(acc)
        return nz + day_min, acc[nz].astype(np.int64)

    def _news_day_series(self) -> tuple[np.ndarray, np.ndarray]:
        if self._news_day_cache is None:
            self._news_day_cache = self.day_series(self.archive.news_flat)
        return self._news_day_cache

    def aggregate(
        self,
        flat: Flat,
        bucket: str = "day",
        normalize: bool = False,
        date_range: tuple[date, date] | None = None,
    ) -> TimeSeries:
        if bucket not in BUCKET_UNITS:
            raise MalformedInputError(f"bucket must be one of {BUCKET_UNITS}")
        days, ms = self.day_series(flat)
        days, ms = _clip_days(days, ms, date_range)
        if not len(days):
            return TimeSeries(bucket, [], np.empty(0, dtype=np.int64), [] if normalize else None)
        bucket_dates, values = roll_up_days(days, ms, bucket)
        series = TimeSeries(bucket, bucket_dates, values)
        if normalize:
            nd, nms = self._news_day_series()
            nd, nms = _clip_days(nd, nms, date_range)
            den_dates, den_values = roll_up_days(nd, nms, bucket)
            den_map = dict(zip(den_dates, den_values.tolist()))
            series.normalized = [
                (int(v) / den_map[d]) if den_map.get(d) else 0.0
                for d, v in zip(series.dates, series.values_ms.tolist())
            ]
        return series

    def run(
        self,
        query: str | Query,
        bucket: str = "day",
        normalize: bool = False,
        date_range: tuple[date, date] | None = None,
    ) -> tuple[TimeSeries, list[str]]:
        res = self.evaluate(query)
        return self.aggregate(res.flat, bucket, normalize, date_range), res.warnings

    # ------------------------------------------------------------------
    # clips

    def clips(
        self,
        query: str | Query,
        page: int = 0,
        page_size: int = 100,
        date_range: tuple[date, date] | None = None,
    ) -> list[Clip]:
        if page_size > 1000:
            raise MalformedInputError("page_size must be <= 1000")
        if page < 0 or page_size < 1:
            raise MalformedInputError("page and page_size must be non-negative")
        ar = self.archive
        res = self.evaluate(query)
        starts, ends = res.flat.starts, res.flat.ends
        if date_range is not None and len(starts):
            days = ar.day_of_slot[starts // DAY_MS]
            keep = (days >= date_to_day(date_range[0])) & (days <= date_to_day(date_range[1]))
            starts, ends = starts[keep], ends[keep]
        if not len(starts):
            return []
        vids = ar.video_of_global(starts)
        order = np.lexsort((starts, ar.air_epoch_ms[vids]))
        lo = page * page_size
        sel = order[lo : lo + page_size]
        out = []
        for i in sel.tolist():
            vi = int(vids[i])
            meta = ar.videos[vi]
            s_local = int(starts[i] - ar.origin[vi])
            e_local = min(int(ends[i] - ar.origin[vi]), meta.duration_ms)
            out.append(
                Clip(
                    video_id=meta.id,
                    channel=meta.channel,
                    show=meta.show,
                    air_utc=meta.air_utc.isoformat().replace("+00:00", "Z"),
                    start_ms=s_local,
                    end_ms=e_local,
                    snippet=self._snippet(vi, s_local, e_local),
                )
            )
        return out

    def _snippet(self, vi: int, start_ms: int, end_ms: int, pad_ms: int = 5000) -> str:
        ar = self.archive
        a, b = ar.tok_offsets[vi], ar.tok_offsets[vi + 1]
        if a == b:
            return ""
        t0 = ar.tok_t0[a:b]
        t1 = ar.tok_t1[a:b]
        keep = (t0 < end_ms + pad_ms) & (t1 > start_ms - pad_ms)
        idx = np.flatnonzero(keep) + a
        if ar.tok_texts is not None:
            words = [ar.tok_texts[int(i)] for i in idx]
        else:
            words = [ar.vocab_list[int(ar.tok_id[i])] for i in idx]
        return " ".join(words)


def _alternatives(value: str) -> list[str]:
    """Comma-separated alternatives within one filter value."""
    return [v.strip() for v in value.split(",") if v.strip()]


def _clip_days(days, ms, date_range):
    if date_range is None or not len(days):
        return days, ms
    lo = date_to_day(date_range[0])
    hi = date_to_day(date_range[1])
    keep = (days >= lo) & (days <= hi)
    return days[keep], ms[keep]


def roll_up_days(days: np.ndarray, ms: np.ndarray, bucket: str) -> tuple[list[date], np.ndarray]:
    """Zero-filled bucket series between the first and last active bucket."""
    if bucket == "day":
        key_days = days
    elif bucket == "week":
        key_days = ((days - 4) // 7) * 7 + 4  # Monday-aligned (epoch day 0 = Thursday)
    else:
        key_days = np.array(
            [bucket_start_day(bucket, int(d)) for d in days], dtype=np.int64
        )
    out_values: dict[int, int] = {}
    for kd, v in zip(key_days.tolist(), ms.tolist()):
        out_values[kd] = out_values.get(kd, 0) + int(v)
    first, last = min(out_values), max(out_values)
    all_keys = _bucket_range(bucket, first, last)
    dates = [day_to_date(k) for k in all_keys]
    values = np.array([out_values.get(k, 0) for k in all_keys], dtype=np.int64)
    return dates, values


def bucket_start_day(bucket: str, day: int) -> int:
    d = day_to_date(day)
    if bucket == "month":
        return date_to_day(d.replace(day=1))
    if bucket == "year":
        return date_to_day(d.replace(month=1, day=1))
    raise MalformedInputError(f"unknown bucket {bucket!r}")


def _bucket_range(bucket: str, first: int, last: int) -> list[int]:
    if bucket == "day":
        return list(range(first, last + 1))
    if bucket == "week":
        return list(range(first, last + 1, 7))
    keys = []
    d = day_to_date(first)
    end = day_to_date(last)
    while d <= end:
        keys.append(date_to_day(d))
        if bucket == "month":
            d = (d.replace(day=28) + timedelta(days=4)).replace(day=1)
        else:
            d = d.replace(year=d.year + 1)
    return keys
