"""Benchmark the compiled cocycle kernel against the pure-numpy fallback.

Usage: python3 benchmarks/bench_cocycle.py [--samples N] [--depth K]
"""

import argparse
import time

import numpy as np

from subspec.catalog import catalog_substitution
from subspec.cocycle import _encoding
from subspec.substitution import substitution_matrix
from subspec._kernels import _cocycle_np

try:
    from subspec._kernels import _cocycle_cy
except ImportError:
    _cocycle_cy = None


def bench(impl, zeta, samples, depth, repeats=5):
    pops, rows, cols = _encoding(zeta)
    st = substitution_matrix(zeta).T.astype(np.float64)
    rng = np.random.default_rng(1)
    xi = rng.random((samples, zeta.d))
    impl.cocycle_products(pops, rows, cols, zeta.d, st, xi[:16], depth)  # warmup
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.cocycle_products(pops, rows, cols, zeta.d, st, xi, depth)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--depth", type=int, default=30)
    args = ap.parse_args()

    print(f"{'substitution':<16} {'d':>2} {'numpy (s)':>10} {'cython (s)':>10} "
          f"{'speedup':>8}")
    for name in ("thue-morse", "fibonacci", "rudin-shapiro", "non-pisot-0111"):
        z = catalog_substitution(name)
        t_np = bench(_cocycle_np, z, args.samples, args.depth)
        if _cocycle_cy is None:
            print(f"{name:<16} {z.d:>2} {t_np:>10.4f} {'n/a':>10} {'n/a':>8}")
            continue
        t_cy = bench(_cocycle_cy, z, args.samples, args.depth)
        print(f"{name:<16} {z.d:>2} {t_np:>10.4f} {t_cy:>10.4f} "
              f"{t_np / t_cy:>7.2f}x")


if __name__ == "__main__":
    main()
