"""Event detectors over the interval algebra.

Commercials are found from black-frame brackets, lowercase/missing
captions, and the absence of ">>" speaker delimiters; interviews from
an alternating guest/host face pattern. All detectors are pure
per-video functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedInputError
from .intervals import IntervalSet


@dataclass(frozen=True)
class CommercialParams:
    black_threshold: float = 0.01
    black_gap_ms: int = 100
    black_min_len_ms: int = 500
    seg_min_len_ms: int = 10_000
    lowercase_gap_ms: int = 5_000
    nocaption_min_ms: int = 30_000
    nocaption_max_ms: int = 270_000
    final_gap_ms: int = 45_000
    final_max_len_ms: int = 300_000

    def __post_init__(self):
        for name in (
            "black_gap_ms",
            "black_min_len_ms",
            "seg_min_len_ms",
            "lowercase_gap_ms",
            "nocaption_min_ms",
            "nocaption_max_ms",
            "final_gap_ms",
            "final_max_len_ms",
        ):
            if getattr(self, name) <= 0:
                raise MalformedInputError(f"{name} must be positive")
        if self.black_threshold <= 0:
            raise MalformedInputError("black_threshold must be positive")
        if self.nocaption_min_ms >= self.nocaption_max_ms:
            raise MalformedInputError("nocaption_min_ms must be < nocaption_max_ms")


@dataclass(frozen=True)
class InterviewParams:
    coalesce_gap_ms: int = 30_000
    adjacency_gap_ms: int = 60_000
    min_duration_ms: int = 240_000

    def __post_init__(self):
        if min(self.coalesce_gap_ms, self.adjacency_gap_ms, self.min_duration_ms) <= 0:
            raise MalformedInputError("interview params must be positive")


def infer_sample_spacing(times: np.ndarray, default_ms: int = 1000) -> int:
    """Median gap between consecutive samples; `default_ms` when undefined."""
    if len(times) < 2:
        return default_ms
    diffs = np.diff(times)
    diffs = diffs[diffs > 0]
    if not len(diffs):
        return default_ms
    return int(np.median(diffs))


def detect_black_frames(
    video_id: str,
    lum_t: np.ndarray,
    lum_value: np.ndarray,
    params: CommercialParams = CommercialParams(),
    spacing_ms: int | None = None,
) -> IntervalSet:
    """Sequences of black frames: sub-threshold samples expanded to the
    sampling spacing, coalesced, and length-filtered."""
    if spacing_ms is None:
        spacing_ms = infer_sample_spacing(lum_t)
    dark = lum_t[lum_value < params.black_threshold]
    starts = np.sort(dark).astype(np.int64)
    spans = IntervalSet._from_arrays(video_id, starts, starts + spacing_ms)
    return spans.coalesce(params.black_gap_ms).filter_length(min_ms=params.black_min_len_ms)


def detect_commercials(
    video_id: str,
    duration_ms: int,
    tok_t0: np.ndarray,
    tok_t1: np.ndarray,
    tok_has_lower: np.ndarray,
    tok_has_arrow: np.ndarray,
    lum_t: np.ndarray,
    lum_value: np.ndarray,
    params: CommercialParams = CommercialParams(),
) -> IntervalSet | None:
    """Commercial spans for one video; None when captions are absent
    (the mask is unknown for such videos, not empty)."""
    if len(tok_t0) == 0:
        return None
    video = IntervalSet(video_id, [(0, duration_ms)])
    tokens = IntervalSet._from_arrays(
        video_id, tok_t0.astype(np.int64), tok_t1.astype(np.int64)
    )
    arrows = IntervalSet._from_arrays(
        video_id,
        tok_t0[tok_has_arrow].astype(np.int64),
        tok_t1[tok_has_arrow].astype(np.int64),
    )
    black = detect_black_frames(video_id, lum_t, lum_value, params)

    candidates = video.minus(black)
    non_commercial = candidates.filter_against(arrows)
    base = (
        video.minus(non_commercial.union(black))
        .canonical()
        .filter_length(min_ms=params.seg_min_len_ms)
    )

    lowercase = IntervalSet._from_arrays(
        video_id,
        tok_t0[tok_has_lower].astype(np.int64),
        tok_t1[tok_has_lower].astype(np.int64),
    ).coalesce(params.lowercase_gap_ms)

    no_captions = video.minus(tokens).filter_length(
        min_ms=params.nocaption_min_ms, max_ms=params.nocaption_max_ms
    )

    return (
        base.union(lowercase)
        .union(no_captions)
        .coalesce(params.final_gap_ms)
        .filter_length(max_ms=params.final_max_len_ms)
    )


def detect_interviews(
    archive,
    video_id: str,
    guest: str,
    hosts: list[str],
    params: InterviewParams = InterviewParams(),
) -> IntervalSet:
    """Interview spans: guest/host segments overlapping and alternating.

    The guest must carry identity labels; a guest listed among the hosts
    is rejected.
    """
    if archive.identity_id(guest) is None:
        raise MalformedInputError(f"unknown guest {guest!r}")
    host_keys = {h.lower() for h in hosts}
    if guest.lower() in host_keys:
        raise MalformedInputError("guest cannot be one of the hosts")

    guest_faces = archive.identity_set(video_id, guest)
    host_faces = IntervalSet.empty(video_id)
    for h in hosts:
        host_faces = host_faces.union(archive.identity_set(video_id, h))

    guest_segs = guest_faces.coalesce(params.coalesce_gap_ms)
    host_segs = host_faces.coalesce(params.coalesce_gap_ms)
    both = guest_segs.join(host_segs, "overlaps", "intersection")
    guest_alone = guest_segs.minus(both)
    merged = both.join(
        guest_alone, "before_or_after", "span", max_gap=params.adjacency_gap_ms
    ).canonical()
    lengths = merged.ends - merged.starts
    keep = lengths >= params.min_duration_ms
    return IntervalSet._from_arrays(video_id, merged.starts[keep], merged.ends[keep])


def detect_shots(
    video_id: str,
    diff_t: np.ndarray,
    diff_value: np.ndarray,
    threshold: float,
    duration_ms: int,
) -> IntervalSet:
    """Shots between histogram-difference boundaries exceeding threshold."""
    if len(diff_t) == 0:
        return IntervalSet.empty(video_id)
    cuts = np.unique(diff_t[diff_value > threshold]).astype(np.int64)
    cuts = cuts[(cuts > 0) & (cuts < duration_ms)]
    bounds = np.concatenate(([0], cuts, [duration_ms]))
    return IntervalSet._from_arrays(video_id, bounds[:-1].copy(), bounds[1:].copy())
