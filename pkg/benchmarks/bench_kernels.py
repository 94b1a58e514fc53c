"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeats 5] [--quick]

Prints per-line times for the lower envelope (the Moreau / Legendre hot loop)
and the O(n^2) symmetrization sweep, the speed-up of the compiled backend, and
the growth factor per doubling of n (linear time shows as ~2).
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from infconv import _backend


def best_time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_envelope(kern, n: int, lines: int, repeats: int) -> float:
    rng = np.random.default_rng(n)
    nodes = np.linspace(-6.0, 6.0, n)
    vals = np.ascontiguousarray(rng.normal(size=(lines, n)) + nodes ** 2 / 4)
    return best_time(lambda: kern.lower_envelope(vals, nodes, nodes, 1.0), repeats) / lines


def bench_symmetrize(kern, n: int, lines: int, repeats: int) -> float:
    rng = np.random.default_rng(n)
    vals = np.ascontiguousarray(rng.normal(size=(lines, n)))
    return best_time(lambda: kern.symmetrize_lines(vals, 12.0 / (n - 1)), repeats) / lines


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args(argv)

    names = sorted(_backend.BACKENDS)
    if "compiled" not in names:
        print("compiled kernels are not built; only the Python fallback is timed")
    env_sizes = [2 ** k + 1 for k in ((10, 12, 14) if args.quick else (12, 14, 15, 16, 17))]
    sym_sizes = [129, 257, 513] if args.quick else [241, 481, 961]

    print(f"{'kernel':<12} {'n':>8} " + " ".join(f"{nm + ' (s/line)':>20}" for nm in names)
          + f" {'speed-up':>10}")
    for label, sizes, fn, lines in (("envelope", env_sizes, bench_envelope, 4),
                                    ("symmetrize", sym_sizes, bench_symmetrize, 8)):
        prev = {}
        for n in sizes:
            times = {nm: fn(_backend.BACKENDS[nm], n, lines, args.repeats) for nm in names}
            speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
            growth = " ".join(f"x{times[nm] / prev[nm]:.2f}" if nm in prev else "" for nm in names)
            print(f"{label:<12} {n:>8} " + " ".join(f"{times[nm]:>20.3e}" for nm in names)
                  + f" {speed:>10.1f}  {growth}")
            prev = times


if __name__ == "__main__":
    main()
