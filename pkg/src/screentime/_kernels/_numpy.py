"""Pure-numpy kernel implementations.

All functions take/return int64 arrays. "Canonical" arguments are
sorted by start with pairwise gaps > 0 (no overlap, no touching).
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

_EMPTY = np.empty(0, dtype=np.int64)

# Sentinels for complement construction; real coordinates are far smaller.
_LOW = np.int64(-(2**62))
_HIGH = np.int64(2**62)


def _empty_pair() -> tuple[np.ndarray, np.ndarray]:
    return _EMPTY.copy(), _EMPTY.copy()


def merge_touching(starts: np.ndarray, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge overlapping or touching intervals; input sorted by start."""
    n = len(starts)
    if n == 0:
        return _empty_pair()
    run_max = np.maximum.accumulate(ends)
    is_head = np.empty(n, dtype=bool)
    is_head[0] = True
    is_head[1:] = starts[1:] > run_max[:-1]
    heads = np.flatnonzero(is_head)
    tails = np.empty(len(heads), dtype=np.int64)
    tails[:-1] = heads[1:] - 1
    tails[-1] = n - 1
    return starts[heads].copy(), run_max[tails].copy()


def coalesce_gap(starts: np.ndarray, ends: np.ndarray, gap: int) -> tuple[np.ndarray, np.ndarray]:
    """Merge canonical neighbours whose gap is strictly less than `gap`."""
    n = len(starts)
    if n == 0:
        return _empty_pair()
    is_head = np.empty(n, dtype=bool)
    is_head[0] = True
    is_head[1:] = starts[1:] - ends[:-1] >= gap
    heads = np.flatnonzero(is_head)
    tails = np.empty(len(heads), dtype=np.int64)
    tails[:-1] = heads[1:] - 1
    tails[-1] = n - 1
    return starts[heads].copy(), ends[tails].copy()


def intersect(
    a_starts: np.ndarray, a_ends: np.ndarray, b_starts: np.ndarray, b_ends: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Intersection of two canonical sets; result canonical."""
    if len(a_starts) == 0 or len(b_starts) == 0:
        return _empty_pair()
    lo = np.searchsorted(b_ends, a_starts, side="right")
    hi = np.searchsorted(b_starts, a_ends, side="left")
    counts = hi - lo
    total = int(counts.sum())
    if total == 0:
        return _empty_pair()
    a_idx = np.repeat(np.arange(len(a_starts)), counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    b_idx = np.arange(total) - offsets[a_idx] + lo[a_idx]
    piece_starts = np.maximum(a_starts[a_idx], b_starts[b_idx])
    piece_ends = np.minimum(a_ends[a_idx], b_ends[b_idx])
    return piece_starts, piece_ends


def subtract(
    a_starts: np.ndarray, a_ends: np.ndarray, b_starts: np.ndarray, b_ends: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Difference a \\ b of two canonical sets; result canonical."""
    if len(a_starts) == 0:
        return _empty_pair()
    if len(b_starts) == 0:
        return a_starts.copy(), a_ends.copy()
    comp_starts = np.empty(len(b_starts) + 1, dtype=np.int64)
    comp_ends = np.empty(len(b_starts) + 1, dtype=np.int64)
    comp_starts[0] = _LOW
    comp_starts[1:] = b_ends
    comp_ends[:-1] = b_starts
    comp_ends[-1] = _HIGH
    return intersect(a_starts, a_ends, comp_starts, comp_ends)


def union(
    a_starts: np.ndarray, a_ends: np.ndarray, b_starts: np.ndarray, b_ends: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Union of two canonical sets; result canonical."""
    starts = np.concatenate((a_starts, b_starts))
    ends = np.concatenate((a_ends, b_ends))
    order = np.argsort(starts, kind="stable")
    return merge_touching(starts[order], ends[order])


def sweep_min_count(
    starts: np.ndarray, ends: np.ndarray, min_count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Spans where at least `min_count` of the given intervals are active.

    Start and end events at the same instant cancel (half-open semantics).
    Result canonical.
    """
    n = len(starts)
    if n == 0:
        return _empty_pair()
    times = np.concatenate((starts, ends))
    deltas = np.concatenate((np.ones(n, dtype=np.int64), -np.ones(n, dtype=np.int64)))
    order = np.argsort(times, kind="stable")
    times = times[order]
    levels = np.cumsum(deltas[order])
    group_last = np.empty(len(times), dtype=bool)
    group_last[-1] = True
    group_last[:-1] = times[1:] != times[:-1]
    unique_times = times[group_last]
    unique_levels = levels[group_last]
    active = unique_levels >= min_count
    prev = np.concatenate(([False], active[:-1]))
    return unique_times[active & ~prev].copy(), unique_times[~active & prev].copy()
