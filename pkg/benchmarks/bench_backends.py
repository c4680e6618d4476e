"""Benchmark the compiled kernels against the pure-Python reference.

Usage:
    python3 benchmarks/bench_backends.py [--n 1000] [--m 50] [--q 20]
                                         [--repeats 5] [--seed 0]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

import mbp._pycore as pycore
from mbp.simgen import CardinalParams, build_packed, draw

try:
    import mbp._core as ccore
except ImportError:
    ccore = None

KERNELS = ("student_da", "school_da", "ttc", "simplify_market", "seq_mbp")


def time_kernel(module, name, args, repeats):
    fn = getattr(module, name)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--m", type=int, default=50)
    parser.add_argument("--q", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    params = CardinalParams(
        lam=0.75, delta=0.5, alpha=0.95, beta=0.5,
        n=args.n, m=args.m, q=args.q,
    )
    pm = build_packed(params, draw(params, args.seed))
    kargs = (pm.pref_data, pm.pref_ptr, pm.prio_data, pm.prio_ptr, pm.cap)

    print(f"market: n={args.n} m={args.m} q={args.q} "
          f"(best of {args.repeats} runs)")
    header = f"{'kernel':<18} {'python':>10}"
    if ccore is not None:
        header += f" {'compiled':>10} {'speedup':>8}"
    print(header)
    da = None
    for name in KERNELS:
        tp = time_kernel(pycore, name, kargs, args.repeats)
        line = f"{name:<18} {tp * 1e3:>8.2f}ms"
        if ccore is not None:
            tc = time_kernel(ccore, name, kargs, args.repeats)
            line += f" {tc * 1e3:>8.2f}ms {tp / tc:>7.1f}x"
            a = getattr(pycore, name)(*kargs)
            b = getattr(ccore, name)(*kargs)
            if name == "simplify_market":
                same = all(np.array_equal(x, y) for x, y in zip(a[:2], b[:2]))
            elif name == "seq_mbp":
                same = (a is None) == (b is None) and (
                    a is None or np.array_equal(a, b)
                )
            else:
                same = np.array_equal(a, b)
                if name == "student_da":
                    da = np.asarray(b if same else a)
            line += "" if same else "  MISMATCH"
        print(line)
    if da is not None:
        pargs = (pm.pref_data, pm.pref_ptr, pm.cap, da)
        tp = time_kernel(pycore, "pareto_improvable", pargs, args.repeats)
        tc = time_kernel(ccore, "pareto_improvable", pargs, args.repeats)
        same = np.array_equal(
            pycore.pareto_improvable(*pargs), ccore.pareto_improvable(*pargs)
        )
        print(
            f"{'pareto_improvable':<18} {tp * 1e3:>8.2f}ms {tc * 1e3:>8.2f}ms "
            f"{tp / tc:>7.1f}x" + ("" if same else "  MISMATCH")
        )
    if ccore is None:
        print("compiled backend unavailable; python timings only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
