"""Archive data model and the immutable in-memory index every query reads.

The archive flattens all per-video timelines onto one global
millisecond axis: each video is assigned a day-aligned slot range so
that (global time mod one day) equals the UTC wall clock of the
original airing. That makes day bucketing, hour-of-day filters, and
cross-video set algebra pure arithmetic on int64 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .errors import MalformedInputError, UnknownVideoError
from .intervals import IntervalSet

DAY_MS = 86_400_000

GENDERS = ("male", "female")


class Flat(NamedTuple):
    """Canonical interval arrays on the global timeline."""

    starts: np.ndarray
    ends: np.ndarray

    @property
    def total_ms(self) -> int:
        return int((self.ends - self.starts).sum())


def empty_flat() -> Flat:
    return Flat(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))


def flat_union(a: Flat, b: Flat) -> Flat:
    return Flat(*K.union(a.starts, a.ends, b.starts, b.ends))


def flat_intersect(a: Flat, b: Flat) -> Flat:
    return Flat(*K.intersect(a.starts, a.ends, b.starts, b.ends))


def flat_subtract(a: Flat, b: Flat) -> Flat:
    return Flat(*K.subtract(a.starts, a.ends, b.starts, b.ends))


@dataclass(frozen=True)
class VideoMeta:
    id: str
    channel: str
    show: str
    air_utc: datetime
    duration_ms: int

    @property
    def air_epoch_ms(self) -> int:
        return round(self.air_utc.timestamp() * 1000)


@dataclass(frozen=True)
class Person:
    name: str
    presenter_on: frozenset[str] = frozenset()
    gender: str | None = None
    birthdate: date | None = None
    hair_color: str | None = None


@dataclass
class RawRecords:
    """Validated columnar records, the contract between ingestion,
    the synthesizer, and Archive.build."""

    videos: list[VideoMeta] = field(default_factory=list)
    persons: list[Person] = field(default_factory=list)

    face_video: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))
    face_t: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    face_bbox: np.ndarray = field(default_factory=lambda: np.empty((0, 4), np.float32))
    face_gender: np.ndarray = field(default_factory=lambda: np.empty(0, np.int8))
    face_gender_score: np.ndarray = field(default_factory=lambda: np.empty(0, np.float32))
    face_identity: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))
    face_identity_score: np.ndarray = field(default_factory=lambda: np.empty(0, np.float32))
    face_desc: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))
    identity_names: list[str] = field(default_factory=list)

    tok_video: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))
    tok_seq: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    tok_t0: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    tok_t1: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    tok_texts: list[str] | None = None
    tok_id: np.ndarray | None = None  # uppercase vocab ids (fast path)
    vocab_list: list[str] | None = None
    tok_has_lower: np.ndarray | None = None
    tok_has_arrow: np.ndarray | None = None

    lum_video: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))
    lum_t: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    lum_value: np.ndarray = field(default_factory=lambda: np.empty(0, np.float32))

    descriptors: np.ndarray | None = None


def _offsets_for(sorted_group_ids: np.ndarray, n_groups: int) -> np.ndarray:
    return np.searchsorted(sorted_group_ids, np.arange(n_groups + 1)).astype(np.int64)


def _grouped_order(ids: np.ndarray, within: np.ndarray | None = None) -> np.ndarray | None:
    """Stable sort order by (ids, within), or None when already sorted.

    Large archives arrive pre-grouped; skipping the argsort avoids
    copying every column.
    """
    if len(ids) < 2:
        return None
    dv = ids[1:] >= ids[:-1]
    if within is None:
        if bool(dv.all()):
            return None
        return np.argsort(ids, kind="stable")
    same = ids[1:] == ids[:-1]
    ok = (ids[1:] > ids[:-1]) | (same & (within[1:] >= within[:-1]))
    if bool(ok.all()):
        return None
    return np.lexsort((within, ids))


def _apply_order(order: np.ndarray | None, arr):
    if order is None or arr is None:
        return arr
    if isinstance(arr, list):
        return [arr[int(i)] for i in order]
    return arr[order]


class Archive:
    """Immutable indexed snapshot of all ingested label streams.

    Built once via `Archive.build`; safe to share between threads.
    """

    def __init__(self):
        raise TypeError("use Archive.build()")

    @classmethod
    def build(
        cls,
        raw: RawRecords,
        *,
        sample_period_ms: int = 3000,
        commercial_params=None,
        detect_commercial_masks: bool = True,
    ) -> "Archive":
        from .detectors import CommercialParams, detect_commercials

        self = cls.__new__(cls)
        self.sample_period_ms = int(sample_period_ms)
        self.videos = list(raw.videos)
        nv = len(self.videos)
        self.video_index = {}
        for i, v in enumerate(self.videos):
            if v.id in self.video_index:
                raise MalformedInputError(f"duplicate video id {v.id!r}")
            self.video_index[v.id] = i
        self.duration_ms = np.array([v.duration_ms for v in self.videos], dtype=np.int64)
        self.air_epoch_ms = np.array([v.air_epoch_ms for v in self.videos], dtype=np.int64)

        # --- global day-aligned timeline -------------------------------
        self.origin = np.zeros(nv, dtype=np.int64)
        self.slot_end = np.zeros(nv, dtype=np.int64)  # global end of each video's slots
        day_of_slot: list[int] = []
        slot = 0
        for i in range(nv):
            wall0 = int(self.air_epoch_ms[i] % DAY_MS)
            day0 = int(self.air_epoch_ms[i] // DAY_MS)
            self.origin[i] = slot * DAY_MS + wall0
            # +1 guard slot keeps videos from ever touching on the axis
            nslots = int((wall0 + self.duration_ms[i]) // DAY_MS) + 2
            day_of_slot.extend(day0 + k for k in range(nslots))
            slot += nslots
            self.slot_end[i] = slot * DAY_MS
        self.day_of_slot = np.array(day_of_slot, dtype=np.int64)
        self.n_slots = slot

        # --- persons & identities --------------------------------------
        self.persons = list(raw.persons)
        self.person_index = {}
        for i, p in enumerate(self.persons):
            key = p.name.lower()
            if key in self.person_index:
                raise MalformedInputError(f"duplicate person name {p.name!r}")
            self.person_index[key] = i

        self.identity_names = list(raw.identity_names)
        self.identity_index = {n.lower(): i for i, n in enumerate(self.identity_names)}

        # --- faces -------------------------------------------------------
        order = _grouped_order(raw.face_video, raw.face_t)
        self.face_video = _apply_order(order, raw.face_video)
        self.face_t = _apply_order(order, raw.face_t)
        self.face_bbox = (
            _apply_order(order, raw.face_bbox) if len(raw.face_bbox) else raw.face_bbox
        )
        self.face_gender = _apply_order(order, raw.face_gender)
        self.face_gender_score = _apply_order(order, raw.face_gender_score)
        self.face_identity = _apply_order(order, raw.face_identity)
        self.face_identity_score = _apply_order(order, raw.face_identity_score)
        self.face_desc = _apply_order(order, raw.face_desc)
        self.face_offsets = _offsets_for(self.face_video, nv)
        self.descriptors = raw.descriptors

        face_g = self.origin[self.face_video] + self.face_t
        self.gender_flat: dict[str, Flat] = {}
        for gi, gname in enumerate(GENDERS):
            sel = self.face_gender == gi
            s = face_g[sel]
            self.gender_flat[gname] = Flat(*K.merge_touching(s, s + self.sample_period_ms))

        self.identity_flat: dict[int, Flat] = {}
        sel = self.face_identity >= 0
        if sel.any():
            ids = self.face_identity[sel]
            s_all = face_g[sel]
            id_order = np.argsort(ids, kind="stable")
            ids_sorted = ids[id_order]
            s_sorted = s_all[id_order]
            uniq, first = np.unique(ids_sorted, return_index=True)
            bounds = np.append(first, len(ids_sorted))
            for k, ident in enumerate(uniq.tolist()):
                s = s_sorted[bounds[k] : bounds[k + 1]]
                self.identity_flat[int(ident)] = Flat(
                    *K.merge_touching(s, s + self.sample_period_ms)
                )
        del face_g

        # --- tokens -------------------------------------------------------
        t_order = _grouped_order(raw.tok_video)
        self.tok_video = _apply_order(t_order, raw.tok_video)
        self.tok_seq = _apply_order(t_order, raw.tok_seq)
        self.tok_t0 = _apply_order(t_order, raw.tok_t0)
        self.tok_t1 = _apply_order(t_order, raw.tok_t1)
        self.tok_offsets = _offsets_for(self.tok_video, nv)
        if raw.tok_id is not None:
            self.tok_id = _apply_order(t_order, raw.tok_id).astype(np.int32, copy=False)
            self.vocab_list = list(raw.vocab_list or [])
            self.tok_texts = _apply_order(t_order, raw.tok_texts)
        else:
            self.tok_texts = _apply_order(t_order, raw.tok_texts or [])
            vocab: dict[str, int] = {}
            ids = np.empty(len(self.tok_texts), dtype=np.int32)
            for i, text in enumerate(self.tok_texts):
                ids[i] = vocab.setdefault(text.upper(), len(vocab))
            self.tok_id = ids
            self.vocab_list = [None] * len(vocab)
            for word, wid in vocab.items():
                self.vocab_list[wid] = word
        self.vocab = {w: i for i, w in enumerate(self.vocab_list)}

        if raw.tok_has_lower is not None:
            self.tok_has_lower = _apply_order(t_order, raw.tok_has_lower)
            self.tok_has_arrow = _apply_order(t_order, raw.tok_has_arrow)
        elif self.tok_texts is not None:
            self.tok_has_lower = np.fromiter(
                (any(c.islower() for c in t) for t in self.tok_texts),
                dtype=bool,
                count=len(self.tok_texts),
            )
            self.tok_has_arrow = np.fromiter(
                (">>" in t for t in self.tok_texts), dtype=bool, count=len(self.tok_texts)
            )
        else:
            self.tok_has_lower = np.zeros(len(self.tok_id), dtype=bool)
            self.tok_has_arrow = np.zeros(len(self.tok_id), dtype=bool)

        p_order = np.argsort(self.tok_id, kind="stable")
        self.postings_pos = p_order.astype(np.int32, copy=False)
        counts = np.bincount(self.tok_id, minlength=len(self.vocab_list))
        self.postings_bounds = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)

        # --- luminance ----------------------------------------------------
        l_order = _grouped_order(raw.lum_video, raw.lum_t)
        self.lum_video = _apply_order(l_order, raw.lum_video)
        self.lum_t = _apply_order(l_order, raw.lum_t)
        self.lum_value = _apply_order(l_order, raw.lum_value)
        self.lum_offsets = _offsets_for(self.lum_video, nv)

        # --- commercial masks & news content ------------------------------
        self.commercial_params = commercial_params or CommercialParams()
        self.mask_known = np.zeros(nv, dtype=bool)
        comm_s: list[np.ndarray] = []
        comm_e: list[np.ndarray] = []
        if detect_commercial_masks:
            for i in range(nv):
                t0, t1 = self.tok_offsets[i], self.tok_offsets[i + 1]
                if t1 == t0:
                    continue  # no captions: commercial mask unknown
                self.mask_known[i] = True
                l0, l1 = self.lum_offsets[i], self.lum_offsets[i + 1]
                comm = detect_commercials(
                    self.videos[i].id,
                    int(self.duration_ms[i]),
                    self.tok_t0[t0:t1],
                    self.tok_t1[t0:t1],
                    self.tok_has_lower[t0:t1],
                    self.tok_has_arrow[t0:t1],
                    self.lum_t[l0:l1],
                    self.lum_value[l0:l1],
                    self.commercial_params,
                )
                if len(comm):
                    comm_s.append(comm.starts + self.origin[i])
                    comm_e.append(comm.ends + self.origin[i])
        else:
            self.mask_known[:] = self.tok_offsets[1:] > self.tok_offsets[:-1]
        if comm_s:
            self.commercial_flat = Flat(np.concatenate(comm_s), np.concatenate(comm_e))
        else:
            self.commercial_flat = empty_flat()
        known = np.flatnonzero(self.mask_known)
        known_spans = Flat(
            self.origin[known], self.origin[known] + self.duration_ms[known]
        )
        self.news_flat = flat_subtract(known_spans, self.commercial_flat)

        # --- presenter label set -------------------------------------------
        self._channel_ids = {}
        for v in self.videos:
            self._channel_ids.setdefault(v.channel, len(self._channel_ids))
        self._video_channel = np.array(
            [self._channel_ids[v.channel] for v in self.videos], dtype=np.int32
        )
        self.presenter_flat = self._build_presenter_flat()

        self._leaf_cache: dict = {}
        return self

    # ------------------------------------------------------------------

    def _build_presenter_flat(self) -> Flat:
        chunks_s: list[np.ndarray] = []
        chunks_e: list[np.ndarray] = []
        for p in self.persons:
            if not p.presenter_on:
                continue
            ident = self.identity_index.get(p.name.lower())
            if ident is None:
                continue
            flat = self.identity_flat.get(ident)
            if flat is None or not len(flat.starts):
                continue
            vids = self.video_of_global(flat.starts)
            allowed = np.array(
                [self._channel_ids[c] for c in p.presenter_on if c in self._channel_ids],
                dtype=np.int32,
            )
            keep = np.isin(self._video_channel[vids], allowed)
            if keep.any():
                chunks_s.append(flat.starts[keep])
                chunks_e.append(flat.ends[keep])
        if not chunks_s:
            return empty_flat()
        starts = np.concatenate(chunks_s)
        ends = np.concatenate(chunks_e)
        order = np.argsort(starts, kind="stable")
        return Flat(*K.merge_touching(starts[order], ends[order]))

    # ------------------------------------------------------------------
    # lookups

    def video_of_global(self, global_ms: np.ndarray) -> np.ndarray:
        """Video index for each global coordinate (must lie in some video's slots)."""
        return np.searchsorted(self.origin, global_ms, side="right") - 1

    def require_video(self, video_id: str) -> int:
        try:
            return self.video_index[video_id]
        except KeyError:
            raise UnknownVideoError(video_id) from None

    def identity_id(self, name: str) -> int | None:
        return self.identity_index.get(name.lower())

    def person(self, name: str) -> Person | None:
        idx = self.person_index.get(name.lower())
        return self.persons[idx] if idx is not None else None

    @property
    def channels(self) -> list[str]:
        return sorted({v.channel for v in self.videos})

    @property
    def shows(self) -> list[str]:
        return sorted({v.show for v in self.videos})

    def date_range(self) -> tuple[date, date] | None:
        if not self.videos:
            return None
        days = [v.air_utc.date() for v in self.videos]
        return min(days), max(days)

    # ------------------------------------------------------------------
    # per-video views (local-millisecond IntervalSets)

    def _local_set(self, flat: Flat, vi: int) -> IntervalSet:
        lo = self.origin[vi]
        hi = self.slot_end[vi]
        a = np.searchsorted(flat.starts, lo, side="left")
        b = np.searchsorted(flat.starts, hi, side="left")
        return IntervalSet._from_arrays(
            self.videos[vi].id, flat.starts[a:b] - lo, flat.ends[a:b] - lo
        )

    def gender_set(self, video_id: str, gender: str) -> IntervalSet:
        return self._local_set(self.gender_flat[gender], self.require_video(video_id))

    def identity_set(self, video_id: str, name: str) -> IntervalSet:
        vi = self.require_video(video_id)
        ident = self.identity_id(name)
        if ident is None or ident not in self.identity_flat:
            return IntervalSet.empty(video_id)
        return self._local_set(self.identity_flat[ident], vi)

    def commercial_set(self, video_id: str) -> IntervalSet | None:
        """Commercial mask for one video; None when unknown (no captions)."""
        vi = self.require_video(video_id)
        if not self.mask_known[vi]:
            return None
        return self._local_set(self.commercial_flat, vi)

    def news_set(self, video_id: str) -> IntervalSet | None:
        vi = self.require_video(video_id)
        if not self.mask_known[vi]:
            return None
        return self._local_set(self.news_flat, vi)

    def face_presence(self, video_id: str, min_count: int = 1) -> IntervalSet:
        """Spans where at least min_count face detections are active."""
        if min_count < 1:
            raise MalformedInputError("min_count must be >= 1")
        vi = self.require_video(video_id)
        a, b = self.face_offsets[vi], self.face_offsets[vi + 1]
        starts = self.face_t[a:b]
        ends = starts + self.sample_period_ms
        s, e = K.sweep_min_count(starts, ends, min_count)
        return IntervalSet._from_arrays(video_id, s, e)

    def video_tokens(self, video_id: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(token ids, t0, t1) for one video, in sequence order."""
        vi = self.require_video(video_id)
        a, b = self.tok_offsets[vi], self.tok_offsets[vi + 1]
        return self.tok_id[a:b], self.tok_t0[a:b], self.tok_t1[a:b]

    def counts(self) -> dict[str, int]:
        return {
            "videos": len(self.videos),
            "faces": int(len(self.face_t)),
            "tokens": int(len(self.tok_id)),
            "luminance": int(len(self.lum_t)),
            "persons": len(self.persons),
            "identities": len(self.identity_names),
            "videos_without_captions": int((~self.mask_known).sum()),
        }
