#!/usr/bin/env python3
"""Benchmark the compiled scan kernels against the pure-Python fallback.

The kernels carry the per-packet recurrences (sticky loss, AR(1) delay)
that dominate correlated-model runs.  Usage:

    python benchmarks/bench_backends.py [n]
"""

import sys
import time

import numpy as np

from railsim import _kernels_py

try:
    from railsim import _kernels
except ImportError:
    _kernels = None


def bench(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    rng = np.random.default_rng(0)
    u_fresh = rng.random(n)
    u_repeat = rng.random(n)
    eps = rng.standard_normal(n)

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled kernels not built; run: python setup.py build_ext --inplace")

    print(f"n = {n:,}")
    print(f"{'kernel':<28}{'backend':<10}{'best (ms)':>12}{'Mops/s':>10}")
    rows = {}
    for corr in (0.0, 0.6):
        for name, mod in backends:
            t = bench(mod.sticky_scan, u_fresh, u_repeat, 0.1, corr, -1)
            rows[(f"sticky_scan corr={corr}", name)] = t
            print(f"{'sticky_scan corr=' + str(corr):<28}{name:<10}"
                  f"{t * 1e3:>12.2f}{n / t / 1e6:>10.1f}")
        for name, mod in backends:
            t = bench(mod.ar1_scan, eps, corr, 0.0, False)
            rows[(f"ar1_scan corr={corr}", name)] = t
            print(f"{'ar1_scan corr=' + str(corr):<28}{name:<10}"
                  f"{t * 1e3:>12.2f}{n / t / 1e6:>10.1f}")

    if _kernels is not None:
        print()
        for kernel in sorted({k for k, _ in rows}):
            speedup = rows[(kernel, "python")] / rows[(kernel, "compiled")]
            print(f"{kernel:<28}compiled is {speedup:6.1f}x the fallback")

    # sanity: identical outputs either way
    if _kernels is not None:
        a, _ = _kernels_py.sticky_scan(u_fresh[:4096], u_repeat[:4096], 0.1, 0.6, -1)
        b, _ = _kernels.sticky_scan(u_fresh[:4096], u_repeat[:4096], 0.1, 0.6, -1)
        assert np.array_equal(a, b)
        x, _ = _kernels_py.ar1_scan(eps[:4096], 0.6, 0.0, False)
        y, _ = _kernels.ar1_scan(eps[:4096], 0.6, 0.0, False)
        assert x.tobytes() == y.tobytes()
        print("\noutputs verified identical across backends")


if __name__ == "__main__":
    main()
