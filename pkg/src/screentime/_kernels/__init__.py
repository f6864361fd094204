"""Hot interval kernels with two interchangeable backends.

The merge-style set operations (intersect/subtract/union) and the
active-count sweep are the inner loops of every query. They ship
as numba @njit kernels with a pure-numpy fallback; both produce
identical outputs.

Backend selection, in order:
  1. env var SCREENTIME_NUMBA=0 forces the numpy path;
  2. otherwise numba is used when importable;
  3. numpy fallback if the numba import fails.

`set_backend()` switches at runtime (used by tests and benchmarks).
"""

from __future__ import annotations

import os

from . import _numpy

# Vectorized helpers shared by both backends.
merge_touching = _numpy.merge_touching
coalesce_gap = _numpy.coalesce_gap

_IMPLS = {"numpy": _numpy}
try:
    from . import _numba

    _IMPLS["numba"] = _numba
    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False


def _default_backend() -> str:
    if os.environ.get("SCREENTIME_NUMBA", "1") == "0":
        return "numpy"
    return "numba" if _HAVE_NUMBA else "numpy"


BACKEND = _default_backend()

intersect = _IMPLS[BACKEND].intersect
subtract = _IMPLS[BACKEND].subtract
union = _IMPLS[BACKEND].union
sweep_min_count = _IMPLS[BACKEND].sweep_min_count


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_IMPLS))


def set_backend(name: str) -> None:
    """Switch the kernel implementation; raises KeyError for unknown names."""
    global BACKEND, intersect, subtract, union, sweep_min_count
    impl = _IMPLS[name]
    BACKEND = name
    intersect = impl.intersect
    subtract = impl.subtract
    union = impl.union
    sweep_min_count = impl.sweep_min_count
