"""Timing comparison of the compiled and pure-Python tensor kernels.

Runs batched truncated tensor multiplication and signature chaining with
both backends on identical inputs and prints a small table of timings
and speedups.  Results are checked to agree to 1e-12 so the benchmark
doubles as a backend consistency check.

Usage: python benchmarks/bench_kernels.py [--paths M] [--steps n] [--level N]
"""

import argparse
import time

import numpy as np

from roughcontrol._kernels import BACKEND, mul, sig_chain, python_impl


def _time(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--paths", type=int, default=256)
    parser.add_argument("--steps", type=int, default=500)
    parser.add_argument("--level", type=int, default=6)
    parser.add_argument("--dim", type=int, default=2)
    args = parser.parse_args()

    if BACKEND == "python":
        print("compiled backend unavailable; timing pure Python only")
    rng = np.random.default_rng(0)
    m, n, d, level = args.paths, args.steps, args.dim, args.level
    p = sum(d ** k for k in range(level + 1))
    a = rng.standard_normal((m, p))
    b = rng.standard_normal((m, p))
    increments = rng.standard_normal((m, n, d)) * 0.05

    rows = []
    for name, batches in (("mul", 50), ("sig_chain", 1)):
        if name == "mul":
            fast = lambda: [mul(a, b, d, level) for _ in range(batches)][-1]
            slow = lambda: [python_impl.mul(a, b, d, level)
                            for _ in range(batches)][-1]
        else:
            fast = lambda: sig_chain(increments, d, level, 1)
            slow = lambda: python_impl.sig_chain(increments, d, level, 1)
        t_fast, r_fast = _time(fast)
        t_slow, r_slow = _time(slow)
        err = float(np.max(np.abs(r_fast - r_slow)))
        if err > 1e-12 * max(1.0, float(np.max(np.abs(r_slow)))):
            raise SystemExit(f"backend mismatch in {name}: {err:g}")
        rows.append((name, t_slow, t_fast, t_slow / t_fast))

    print(f"backend: {BACKEND}; paths={m} steps={n} level={level} "
          f"(flat length {p})")
    print(f"{'kernel':<12}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, t_slow, t_fast, speedup in rows:
        print(f"{name:<12}{t_slow:>12.4f}{t_fast:>14.4f}{speedup:>10.1f}")


if __name__ == "__main__":
    main()
