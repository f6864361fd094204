"""Half-open millisecond interval sets and their algebra.

Every detector, query, and analysis in this package is expressed over
`IntervalSet`: a per-video, sorted collection of [start, end) intervals
with integer-millisecond endpoints. Set operations return canonical
sets (sorted, pairwise gap > 0); filters preserve the source intervals
and their payloads.
"""

from __future__ import annotations

from typing import Any, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import MalformedInputError, VideoMismatchError

_JOIN_CHUNK_CELLS = 4_000_000


def _as_int64(values: Sequence[int]) -> np.ndarray:
    return np.asarray(values, dtype=np.int64)


class IntervalSet:
    """Sorted set of half-open [start, end) intervals within one video.

    Intervals may carry an opaque payload. Merging operations (union,
    intersect, minus, coalesce, join, canonical) drop payloads because
    merged intervals have no single source record; filtering operations
    preserve them.
    """

    __slots__ = ("video_id", "starts", "ends", "payloads")

    def __init__(
        self,
        video_id: str,
        intervals: Iterable[tuple] = (),
        payloads: Sequence[Any] | None = None,
    ):
        pairs = list(intervals)
        if pairs and len(pairs[0]) == 3:
            if payloads is not None:
                raise MalformedInputError("payloads given both inline and as argument")
            payloads = [p for _, _, p in pairs]
            pairs = [(s, e) for s, e, _ in pairs]
        starts = _as_int64([p[0] for p in pairs])
        ends = _as_int64([p[1] for p in pairs])
        if payloads is not None and len(payloads) != len(starts):
            raise MalformedInputError("payload count does not match interval count")
        if len(starts):
            if starts.min() < 0:
                raise MalformedInputError("negative interval start")
            bad = np.flatnonzero(ends < starts)
            if len(bad):
                i = int(bad[0])
                raise MalformedInputError(
                    f"interval end < start: [{starts[i]}, {ends[i]})"
                )
            order = np.lexsort((ends, starts))
            starts = starts[order]
            ends = ends[order]
            if payloads is not None:
                payloads = tuple(payloads[int(i)] for i in order)
        else:
            payloads = tuple(payloads) if payloads else None
        self.video_id = video_id
        self.starts = starts
        self.ends = ends
        self.payloads = tuple(payloads) if payloads else None

    @classmethod
    def _from_arrays(
        cls,
        video_id: str,
        starts: np.ndarray,
        ends: np.ndarray,
        payloads: tuple | None = None,
    ) -> "IntervalSet":
        """Trusted constructor: arrays already sorted and valid."""
        out = cls.__new__(cls)
        out.video_id = video_id
        out.starts = starts
        out.ends = ends
        out.payloads = payloads
        return out

    @classmethod
    def empty(cls, video_id: str) -> "IntervalSet":
        return cls(video_id)

    # ------------------------------------------------------------------
    # introspection

    def __len__(self) -> int:
        return len(self.starts)

    def __bool__(self) -> bool:
        return len(self.starts) > 0

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.starts.tolist(), self.ends.tolist()))

    def items(self) -> list[tuple[int, int, Any]]:
        payloads = self.payloads or (None,) * len(self)
        return [
            (int(s), int(e), p)
            for s, e, p in zip(self.starts, self.ends, payloads)
        ]

    def __iter__(self):
        return iter(self.pairs())

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (
            self.video_id == other.video_id
            and np.array_equal(self.starts, other.starts)
            and np.array_equal(self.ends, other.ends)
            and self.payloads == other.payloads
        )

    def __repr__(self) -> str:
        inner = ", ".join(f"[{s},{e})" for s, e in self.pairs()[:6])
        if len(self) > 6:
            inner += f", ... {len(self)} total"
        return f"IntervalSet({self.video_id!r}, {{{inner}}})"

    @property
    def is_canonical(self) -> bool:
        if len(self) < 2:
            return True
        return bool(np.all(self.starts[1:] > self.ends[:-1]))

    # ------------------------------------------------------------------
    # set algebra (canonical results, payloads dropped)

    def canonical(self) -> "IntervalSet":
        """Overlap-free form denoting the identical point set."""
        nonempty = self.starts < self.ends
        s, e = K.merge_touching(self.starts[nonempty], self.ends[nonempty])
        return IntervalSet._from_arrays(self.video_id, s, e)

    def _check_video(self, other: "IntervalSet") -> None:
        if self.video_id != other.video_id:
            raise VideoMismatchError(
                f"mismatched video ids: {self.video_id!r} vs {other.video_id!r}"
            )

    def union(self, other: "IntervalSet") -> "IntervalSet":
        self._check_video(other)
        a, b = self.canonical(), other.canonical()
        s, e = K.union(a.starts, a.ends, b.starts, b.ends)
        return IntervalSet._from_arrays(self.video_id, s, e)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        self._check_video(other)
        a, b = self.canonical(), other.canonical()
        s, e = K.intersect(a.starts, a.ends, b.starts, b.ends)
        return IntervalSet._from_arrays(self.video_id, s, e)

    def minus(self, other: "IntervalSet") -> "IntervalSet":
        self._check_video(other)
        a, b = self.canonical(), other.canonical()
        s, e = K.subtract(a.starts, a.ends, b.starts, b.ends)
        return IntervalSet._from_arrays(self.video_id, s, e)

    def coalesce(self, max_gap: int) -> "IntervalSet":
        """Merge intervals whose gap is strictly less than `max_gap`."""
        if max_gap < 0:
            raise MalformedInputError("negative max_gap")
        c = self.canonical()
        s, e = K.coalesce_gap(c.starts, c.ends, int(max_gap))
        return IntervalSet._from_arrays(self.video_id, s, e)

    def duration_sum(self) -> int:
        """Total measure in ms; overlaps counted once."""
        c = self.canonical()
        return int((c.ends - c.starts).sum())

    # ------------------------------------------------------------------
    # filters (source intervals and payloads preserved)

    def filter_length(self, min_ms: int | None = None, max_ms: int | None = None) -> "IntervalSet":
        """Keep intervals with min_ms < length < max_ms (strict on both ends)."""
        if min_ms is not None and max_ms is not None and min_ms > max_ms:
            raise MalformedInputError("filter_length: min > max")
        lengths = self.ends - self.starts
        keep = np.ones(len(self), dtype=bool)
        if min_ms is not None:
            keep &= lengths > min_ms
        if max_ms is not None:
            keep &= lengths < max_ms
        return self._subset(keep)

    def filter_against(self, other: "IntervalSet", predicate: str = "overlaps") -> "IntervalSet":
        """Keep intervals of self that overlap at least one interval of other."""
        self._check_video(other)
        if predicate != "overlaps":
            raise MalformedInputError(f"unknown predicate {predicate!r}")
        b = other.canonical()
        if not len(b) or not len(self):
            return self._subset(np.zeros(len(self), dtype=bool))
        idx = np.searchsorted(b.starts, self.ends, side="left")
        keep = (idx > 0) & (b.ends[np.maximum(idx - 1, 0)] > self.starts)
        keep &= self.ends > self.starts  # empty intervals overlap nothing
        return self._subset(keep)

    def _subset(self, keep: np.ndarray) -> "IntervalSet":
        payloads = None
        if self.payloads is not None:
            payloads = tuple(p for p, k in zip(self.payloads, keep) if k)
        return IntervalSet._from_arrays(
            self.video_id, self.starts[keep], self.ends[keep], payloads
        )

    # ------------------------------------------------------------------
    # pairwise join

    def join(
        self,
        other: "IntervalSet",
        predicate: str = "overlaps",
        merge: str = "intersection",
        max_gap: int | None = None,
    ) -> "IntervalSet":
        """Emit merge(x, y) for every (x, y) pair satisfying the predicate.

        Pairs range over the source intervals of both sets. The
        before_or_after predicate holds when one interval ends at or
        before the other starts with gap strictly less than `max_gap`.
        Result is canonical.
        """
        self._check_video(other)
        if predicate not in ("overlaps", "before_or_after"):
            raise MalformedInputError(f"unknown predicate {predicate!r}")
        if merge not in ("intersection", "span"):
            raise MalformedInputError(f"unknown merge {merge!r}")
        if predicate == "before_or_after":
            if merge == "intersection":
                raise MalformedInputError(
                    "join: intersection merge is meaningless with before_or_after"
                )
            if max_gap is None or max_gap < 0:
                raise MalformedInputError("before_or_after requires a non-negative max_gap")
        if not len(self) or not len(other):
            return IntervalSet.empty(self.video_id)

        out_s: list[np.ndarray] = []
        out_e: list[np.ndarray] = []
        rows_per_chunk = max(1, _JOIN_CHUNK_CELLS // max(1, len(other)))
        for lo in range(0, len(self), rows_per_chunk):
            hi = lo + rows_per_chunk
            a_s = self.starts[lo:hi, None]
            a_e = self.ends[lo:hi, None]
            b_s = other.starts[None, :]
            b_e = other.ends[None, :]
            if predicate == "overlaps":
                # empty intervals denote the empty set and overlap nothing
                mask = (a_s < b_e) & (b_s < a_e) & (a_s < a_e) & (b_s < b_e)
            else:
                gap_ab = b_s - a_e
                gap_ba = a_s - b_e
                mask = ((gap_ab >= 0) & (gap_ab < max_gap)) | (
                    (gap_ba >= 0) & (gap_ba < max_gap)
                )
            ai, bi = np.nonzero(mask)
            if not len(ai):
                continue
            if merge == "intersection":
                out_s.append(np.maximum(a_s[ai, 0], other.starts[bi]))
                out_e.append(np.minimum(a_e[ai, 0], other.ends[bi]))
            else:
                out_s.append(np.minimum(a_s[ai, 0], other.starts[bi]))
                out_e.append(np.maximum(a_e[ai, 0], other.ends[bi]))
        if not out_s:
            return IntervalSet.empty(self.video_id)
        starts = np.concatenate(out_s)
        ends = np.concatenate(out_e)
        order = np.lexsort((ends, starts))
        s, e = K.merge_touching(starts[order], ends[order])
        return IntervalSet._from_arrays(self.video_id, s, e)


def canonicalize(raw: IntervalSet) -> IntervalSet:
    """Spec-named alias for IntervalSet.canonical()."""
    return raw.canonical()
