"""Benchmark the interval kernels: numba @njit vs the pure-numpy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 10000,1000000] [--repeat 5]

The numpy fallback is also what runs when SCREENTIME_NUMBA=0.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from screentime._kernels import _numpy, available_backends


def make_canonical(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    gaps = rng.integers(1, 2000, size=n)
    lengths = rng.integers(1, 3000, size=n)
    starts = np.cumsum(gaps + lengths) - lengths
    return starts.astype(np.int64), (starts + lengths).astype(np.int64)


def bench(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="10000,100000,1000000")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    impls = {"numpy": _numpy}
    if "numba" in available_backends():
        from screentime._kernels import _numba

        impls["numba"] = _numba
        # trigger JIT compilation outside the timed region
        warm = np.array([0, 10], dtype=np.int64), np.array([5, 15], dtype=np.int64)
        for op in ("intersect", "subtract", "union"):
            getattr(_numba, op)(*warm, *warm)
        _numba.sweep_min_count(warm[0], warm[1], 1)

    rng = np.random.default_rng(7)
    print(f"{'op':<16}{'n':>10}  " + "".join(f"{name:>12}" for name in impls))
    for n in sizes:
        a = make_canonical(rng, n)
        b = make_canonical(rng, n)
        for op in ("intersect", "subtract", "union"):
            times = {
                name: bench(getattr(impl, op), (*a, *b), args.repeat)
                for name, impl in impls.items()
            }
            cells = "".join(f"{t * 1000:>10.2f}ms" for t in times.values())
            print(f"{op:<16}{n:>10}  {cells}")
        sweep_args = (a[0], a[0] + rng.integers(1, 50_000, size=n), 2)
        times = {
            name: bench(impl.sweep_min_count, sweep_args, args.repeat)
            for name, impl in impls.items()
        }
        cells = "".join(f"{t * 1000:>10.2f}ms" for t in times.values())
        print(f"{'sweep_min_count':<16}{n:>10}  {cells}")

    # sanity: identical outputs
    a = make_canonical(rng, 10_000)
    b = make_canonical(rng, 10_000)
    for op in ("intersect", "subtract", "union"):
        outs = [getattr(impl, op)(*a, *b) for impl in impls.values()]
        assert all(np.array_equal(outs[0][k], o[k]) for o in outs for k in (0, 1))
    print("backends agree on random inputs")


if __name__ == "__main__":
    main()
