"""Embedding-space labeling kernels and label-quality statistics.

Exact (non-approximate) nearest-neighbour search over 128-d face
descriptors, within-video identity propagation, confusion-matrix
arithmetic, error-rate count adjustment, and proportion confidence
intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedInputError

_Z = {0.90: 1.644854, 0.95: 1.959964, 0.99: 2.575829}


def _sq_distances(query: np.ndarray, train: np.ndarray) -> np.ndarray:
    diff = train.astype(np.float64) - query.astype(np.float64)
    return np.einsum("ij,ij->i", diff, diff)


def knn_classify(query: np.ndarray, train: np.ndarray, labels, k: int) -> tuple[object, float]:
    """Majority label among the k nearest training descriptors (Euclidean).

    Ties break toward the smaller aggregate distance; under exact
    symmetry the label whose member appears first in the stable
    distance ordering wins. Returns (label, vote fraction).
    """
    train = np.asarray(train, dtype=np.float32)
    if train.ndim != 2 or len(train) == 0:
        raise MalformedInputError("empty training set")
    if not (1 <= k <= len(train)):
        raise MalformedInputError(f"k must lie in [1, {len(train)}]")
    labels = list(labels)
    if len(labels) != len(train):
        raise MalformedInputError("labels must match training descriptors")
    d2 = _sq_distances(np.asarray(query, dtype=np.float32), train)
    order = np.argsort(d2, kind="stable")[:k]
    votes: dict = {}
    sums: dict = {}
    first_seen: dict = {}
    for rank, idx in enumerate(order.tolist()):
        lab = labels[idx]
        votes[lab] = votes.get(lab, 0) + 1
        sums[lab] = sums.get(lab, 0.0) + float(np.sqrt(d2[idx]))
        first_seen.setdefault(lab, rank)
    best = min(votes, key=lambda lab: (-votes[lab], sums[lab], first_seen[lab]))
    return best, votes[best] / k


def propagate_identity(
    identities: np.ndarray,
    desc_idx: np.ndarray,
    descriptors: np.ndarray,
    threshold: float,
) -> np.ndarray:
    """Propagate identity labels within one video.

    An unidentified face gains the label of the nearest identified
    descriptor when that L2 distance is strictly below the threshold.
    Existing identities are never overridden. Returns a new array.
    """
    if threshold <= 0:
        raise MalformedInputError("threshold must be positive")
    out = identities.copy()
    has_desc = desc_idx >= 0
    known = (identities >= 0) & has_desc
    unknown = (identities < 0) & has_desc
    if not known.any() or not unknown.any():
        return out
    known_vecs = descriptors[desc_idx[known]].astype(np.float64)
    known_labels = identities[known]
    unknown_rows = np.flatnonzero(unknown)
    vecs = descriptors[desc_idx[unknown_rows]].astype(np.float64)
    # pairwise squared distances via the expansion trick
    d2 = (
        (vecs * vecs).sum(axis=1)[:, None]
        + (known_vecs * known_vecs).sum(axis=1)[None, :]
        - 2.0 * vecs @ known_vecs.T
    )
    np.maximum(d2, 0.0, out=d2)
    nearest = np.argmin(d2, axis=1)
    dmin = np.sqrt(d2[np.arange(len(unknown_rows)), nearest])
    hit = dmin < threshold
    out[unknown_rows[hit]] = known_labels[nearest[hit]]
    return out


def propagate_identity_archive(archive, threshold: float) -> np.ndarray:
    """Per-video propagation over a whole archive; returns the augmented
    face identity column (the archive itself stays immutable)."""
    if archive.descriptors is None:
        raise MalformedInputError("archive has no descriptors")
    out = archive.face_identity.copy()
    for vi in range(len(archive.videos)):
        a, b = archive.face_offsets[vi], archive.face_offsets[vi + 1]
        if a == b:
            continue
        out[a:b] = propagate_identity(
            archive.face_identity[a:b],
            archive.face_desc[a:b],
            archive.descriptors,
            threshold,
        )
    return out


def nn_cluster_assign(faces: np.ndarray, exemplars: np.ndarray, labels) -> list:
    """Assign each face the label of its single nearest exemplar (exact 1-NN)."""
    exemplars = np.asarray(exemplars, dtype=np.float64)
    if exemplars.ndim != 2 or len(exemplars) == 0:
        raise MalformedInputError("empty exemplar set")
    labels = list(labels)
    if len(labels) != len(exemplars):
        raise MalformedInputError("labels must match exemplars")
    faces = np.asarray(faces, dtype=np.float64)
    d2 = (
        (faces * faces).sum(axis=1)[:, None]
        + (exemplars * exemplars).sum(axis=1)[None, :]
        - 2.0 * faces @ exemplars.T
    )
    nearest = np.argmin(d2, axis=1)  # ties -> first index
    return [labels[int(i)] for i in nearest]


@dataclass(frozen=True)
class ConfusionMatrix:
    """Human labels on rows, model labels on columns."""

    labels: tuple[str, ...]
    counts: np.ndarray  # shape (n, n), human x model

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise MalformedInputError("confusion matrix must be square")
        if counts.shape[0] != len(self.labels):
            raise MalformedInputError("labels must match matrix size")
        if (counts < 0).any():
            raise MalformedInputError("confusion counts must be non-negative")
        if not counts.any():
            raise MalformedInputError("confusion matrix must have a non-zero row")
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class LabelStats:
    labels: tuple[str, ...]
    precision: dict    # label -> float | None (None when undefined)
    recall: dict


def confusion_stats(matrix: ConfusionMatrix) -> LabelStats:
    """Per-class precision (column-wise) and recall (row-wise);
    zero denominators yield None."""
    counts = matrix.counts
    precision: dict = {}
    recall: dict = {}
    for i, label in enumerate(matrix.labels):
        col = int(counts[:, i].sum())
        row = int(counts[i, :].sum())
        precision[label] = (int(counts[i, i]) / col) if col else None
        recall[label] = (int(counts[i, i]) / row) if row else None
    return LabelStats(matrix.labels, precision, recall)


def adjust_counts(raw: dict, stats: LabelStats) -> dict:
    """Shift raw model counts by per-class false-discovery mass.

    For each class c, raw_c * (1 - precision_c) of its count belongs to
    other classes; that mass leaves c and is distributed over the other
    classes (for two classes this is the exact binary correction;
    otherwise proportionally to the receivers' raw counts). The total is
    conserved exactly.
    """
    labels = [lab for lab in stats.labels if lab in raw]
    if set(raw) - set(labels):
        raise MalformedInputError("raw counts contain labels missing from stats")
    outflow: dict = {}
    for lab in labels:
        count = float(raw[lab])
        if count < 0:
            raise MalformedInputError("counts must be non-negative")
        if count > 0 and stats.precision.get(lab) is None:
            raise MalformedInputError(f"precision undefined for non-empty class {lab!r}")
        p = stats.precision.get(lab)
        outflow[lab] = count * (1.0 - p) if p is not None else 0.0
    adjusted = {lab: float(raw[lab]) - outflow[lab] for lab in labels}
    for src in labels:
        others = [lab for lab in labels if lab != src]
        if not others or outflow[src] == 0.0:
            continue
        weight_total = sum(float(raw[lab]) for lab in others)
        for dst in others:
            share = (float(raw[dst]) / weight_total) if weight_total else 1.0 / len(others)
            adjusted[dst] += outflow[src] * share
    # pin the last class so the total is conserved exactly despite rounding
    total = sum(float(raw[lab]) for lab in labels)
    last = labels[-1]
    adjusted[last] = total - sum(v for lab, v in adjusted.items() if lab != last)
    return adjusted


def proportion_ci(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Sample proportion with a normal-approximation half-width."""
    if n < 1:
        raise MalformedInputError("n must be >= 1")
    if not (0 <= successes <= n):
        raise MalformedInputError("successes must lie in [0, n]")
    try:
        z = _Z[round(confidence, 2)]
    except KeyError:
        raise MalformedInputError(f"unsupported confidence {confidence}") from None
    p = successes / n
    half = z * np.sqrt(p * (1.0 - p) / n)
    return p, float(half)
