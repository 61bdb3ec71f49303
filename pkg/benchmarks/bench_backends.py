#!/usr/bin/env python3
"""Time the compiled event loop against the pure-Python one.

Runs every policy on identical workloads with both backends, reports the
best-of-N wall time per run and the speedup.  The compiled backend must be
importable (build the extension first) or the script reports Python only.

Usage:
    python3 benchmarks/bench_backends.py [--njobs 10000] [--repeat 3]
"""

import argparse
import time

from sizesched.engine import active_backend, simulate
from sizesched.policies import POLICIES
from sizesched.workload import WeibullSizes, WorkloadSpec, generate


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--njobs", type=int, default=10_000)
    parser.add_argument("--shape", type=float, default=0.25)
    parser.add_argument("--sigma", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    workload = generate(WorkloadSpec(
        njobs=args.njobs, size_dist=WeibullSizes(args.shape),
        sigma=args.sigma, seed=args.seed,
    ))
    have_compiled = active_backend() == "compiled"
    if not have_compiled:
        print("compiled backend unavailable; timing pure Python only")

    print(f"njobs={args.njobs} shape={args.shape} sigma={args.sigma} "
          f"best of {args.repeat}")
    header = f"{'policy':<10} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name in POLICIES:
        py = best_of(args.repeat, lambda: simulate(workload, name, backend="python"))
        if have_compiled:
            cy = best_of(args.repeat, lambda: simulate(workload, name, backend="compiled"))
            print(f"{name:<10} {py:>9.4f}s {cy:>9.4f}s {py / cy:>7.1f}x")
        else:
            print(f"{name:<10} {py:>9.4f}s {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
