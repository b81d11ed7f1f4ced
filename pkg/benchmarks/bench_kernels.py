"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the trajectory-iteration kernel on workloads shaped like the real
ones (many steps at small dimension, few steps at large dimension) and
checks that both backends agree along the way.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qvolterra import _kernels_py

try:
    from qvolterra import _kernels_c
except ImportError:
    _kernels_c = None

WORKLOADS = [
    ("dim 3,    1e5 steps", 3, 100_000),
    ("dim 40,   1e4 steps", 40, 10_000),
    ("dim 200,  1e3 steps", 200, 1_000),
    ("dim 2000, 20 steps", 2000, 20),
]


def make_inputs(dim: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-1.0, 1.0, size=(dim, dim))
    upper = np.triu(raw, 1)
    a = upper - upper.T
    w = rng.dirichlet(np.ones(dim))
    return a, w


def time_backend(impl, a, w, steps: int, repeats: int) -> tuple[float, np.ndarray]:
    best = float("inf")
    final = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        rec, _, _ = impl.volterra_iterate(a, w, steps, steps)
        best = min(best, time.perf_counter() - t0)
        final = rec[-1]
    return best, final


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("cython", _kernels_c))
    else:
        print("compiled kernels not built; timing the numpy fallback only")

    header = f"{'workload':<22}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for label, dim, steps in WORKLOADS:
        a, w = make_inputs(dim)
        if len(backends) == 2:
            # single-step agreement; long runs amplify last-ulp differences
            gap = np.abs(backends[0][1].volterra_step(a, w) - backends[1][1].volterra_step(a, w)).max()
            assert gap <= 1e-14, f"backends disagree on one step by {gap}"
        times = []
        for _, impl in backends:
            t, _ = time_backend(impl, a, w, steps, args.repeats)
            times.append(t)
        row = f"{label:<22}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
