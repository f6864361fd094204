"""Numba @njit kernel implementations (two-pointer merges, O(n + m))."""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND = "numba"


@njit(cache=True)
def intersect(a_starts, a_ends, b_starts, b_ends):
    na, nb = len(a_starts), len(b_starts)
    cap = na + nb
    out_s = np.empty(cap, dtype=np.int64)
    out_e = np.empty(cap, dtype=np.int64)
    i = j = k = 0
    while i < na and j < nb:
        s = max(a_starts[i], b_starts[j])
        e = min(a_ends[i], b_ends[j])
        if s < e:
            out_s[k] = s
            out_e[k] = e
            k += 1
        if a_ends[i] < b_ends[j]:
            i += 1
        elif b_ends[j] < a_ends[i]:
            j += 1
        else:
            i += 1
            j += 1
    return out_s[:k].copy(), out_e[:k].copy()


@njit(cache=True)
def subtract(a_starts, a_ends, b_starts, b_ends):
    na, nb = len(a_starts), len(b_starts)
    cap = na + nb + 1
    out_s = np.empty(cap, dtype=np.int64)
    out_e = np.empty(cap, dtype=np.int64)
    k = 0
    j = 0
    for i in range(na):
        cur = a_starts[i]
        end = a_ends[i]
        while j < nb and b_ends[j] <= cur:
            j += 1
        jj = j
        while jj < nb and b_starts[jj] < end:
            if b_starts[jj] > cur:
                out_s[k] = cur
                out_e[k] = b_starts[jj]
                k += 1
            if b_ends[jj] > cur:
                cur = b_ends[jj]
            if b_ends[jj] >= end:
                break
            jj += 1
        if cur < end:
            out_s[k] = cur
            out_e[k] = end
            k += 1
    return out_s[:k].copy(), out_e[:k].copy()


@njit(cache=True)
def union(a_starts, a_ends, b_starts, b_ends):
    na, nb = len(a_starts), len(b_starts)
    cap = na + nb
    out_s = np.empty(cap, dtype=np.int64)
    out_e = np.empty(cap, dtype=np.int64)
    i = j = k = 0
    have = False
    cur_s = np.int64(0)
    cur_e = np.int64(0)
    while i < na or j < nb:
        if j >= nb or (i < na and a_starts[i] <= b_starts[j]):
            s, e = a_starts[i], a_ends[i]
            i += 1
        else:
            s, e = b_starts[j], b_ends[j]
            j += 1
        if not have:
            cur_s, cur_e = s, e
            have = True
        elif s <= cur_e:
            if e > cur_e:
                cur_e = e
        else:
            out_s[k] = cur_s
            out_e[k] = cur_e
            k += 1
            cur_s, cur_e = s, e
    if have:
        out_s[k] = cur_s
        out_e[k] = cur_e
        k += 1
    return out_s[:k].copy(), out_e[:k].copy()


@njit(cache=True)
def sweep_min_count(starts, ends, min_count):
    n = len(starts)
    out_s = np.empty(n, dtype=np.int64)
    out_e = np.empty(n, dtype=np.int64)
    if n == 0:
        return out_s, out_e
    sorted_ends = np.sort(ends)
    i = j = k = 0
    count = 0
    in_span = False
    span_start = np.int64(0)
    while j < n:
        if i < n and starts[i] <= sorted_ends[j]:
            t = starts[i]
        else:
            t = sorted_ends[j]
        while i < n and starts[i] == t:
            count += 1
            i += 1
        while j < n and sorted_ends[j] == t:
            count -= 1
            j += 1
        if not in_span and count >= min_count:
            in_span = True
            span_start = t
        elif in_span and count < min_count:
            out_s[k] = span_start
            out_e[k] = t
            k += 1
            in_span = False
    return out_s[:k].copy(), out_e[:k].copy()
