#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure fallbacks.

Run:  python benchmarks/bench_kernels.py [--n 16] [--reps 20]
The same fallback path is selected package-wide by SUBGRAPH_LAB_NO_NUMBA=1.
"""

import argparse
import time

import numpy as np

from subgraph_lab import _kernels as K
from subgraph_lab.graphs import erdos_renyi


def timeit(fn, *args, reps):
    fn(*args)  # warm-up (JIT compile)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=16)
    parser.add_argument("--reps", type=int, default=20)
    args = parser.parse_args()

    g = erdos_renyi(args.n, 0.4, seed=7)
    adj = np.ascontiguousarray(g.adjacency)
    colors = (adj.astype(np.int64) * 1) + 2 * np.eye(args.n, dtype=np.int64)

    pairs = [
        ("triangle_counts", K._triangle_counts_py, adj),
        ("tailed_triangle_counts", K._tailed_triangle_counts_py, adj),
        ("star3_counts", K._star3_counts_py, adj),
        ("cycle4_counts", K._cycle4_counts_py, adj),
        ("fwl2_signatures", K._fwl2_signatures_py, (colors, 3)),
    ]
    if not K.HAS_NUMBA:
        print("numba unavailable or disabled; timing the fallback path only")
    print(f"n = {args.n}, reps = {args.reps}")
    print(f"{'kernel':26s} {'fallback':>12s} {'numba':>12s} {'speedup':>9s}")
    for name, fallback, payload in pairs:
        payload = payload if isinstance(payload, tuple) else (payload,)
        t_py = timeit(fallback, *payload, reps=args.reps)
        if K.HAS_NUMBA:
            jitted = getattr(K, f"_{name}_njit")
            t_jit = timeit(jitted, *payload, reps=args.reps)
            print(f"{name:26s} {t_py * 1e3:10.3f}ms {t_jit * 1e3:10.3f}ms {t_py / t_jit:8.1f}x")
        else:
            print(f"{name:26s} {t_py * 1e3:10.3f}ms {'-':>12s} {'-':>9s}")


if __name__ == "__main__":
    main()
