"""Benchmark the compiled enumeration kernels against the pure-Python fallback.

Run:  python benchmarks/bench_kernels.py [--repeats 3]

The injective-placement loops are the scalar-hot path of the package (the
batched linear algebra elsewhere is BLAS-bound either way), so this is the
comparison that justifies shipping the extension.
"""

import argparse
import time

import numpy as np

from ldlab.kernels import _core_py

try:
    from ldlab.kernels import _core
except ImportError:
    _core = None

from ldlab.subgraph import CYCLE4, PATH2, TRIANGLE, _edge_value_stack


def _sym(rng, n):
    w = rng.normal(size=(n, n))
    m = np.triu(w, 1)
    m = m + m.T
    np.fill_diagonal(m, 0.0)
    return m


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _core is None:
        print("compiled extension not built; showing fallback timings only")
    rng = np.random.default_rng(0)
    cases = [
        ("injection_sum", TRIANGLE, 40),
        ("injection_sum", CYCLE4, 24),
        ("injection_grad", TRIANGLE, 24),
        ("injection_hess", PATH2, 40),
        ("dtensor_sq", TRIANGLE, 20),
    ]
    print(f"{'kernel':<16} {'pattern':<10} {'n':>4} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for kind, pat, n in cases:
        m = _sym(rng, n)
        vals = _edge_value_stack(m, pat)
        eu, ev, lev_ptr, lev_edge, lev_other = pat._bfs_order()
        if kind == "injection_sum":
            argsets = (vals, lev_ptr, lev_edge, lev_other, pat.nverts)
            f_c = _core.injection_sum if _core else None
            f_p = _core_py.injection_sum
        elif kind == "injection_grad":
            argsets = (vals, eu, ev, lev_ptr, lev_edge, lev_other, pat.nverts)
            f_c = _core.injection_grad if _core else None
            f_p = _core_py.injection_grad
        elif kind == "injection_hess":
            x = _sym(rng, n)
            argsets = (vals, x, eu, ev, pat.nverts)
            f_c = _core.injection_hess_apply if _core else None
            f_p = _core_py.injection_hess_apply
        else:
            argsets = (vals, eu, ev, pat.nverts, pat.nedges - 1)
            f_c = _core.dtensor_sq_sums if _core else None
            f_p = _core_py.dtensor_sq_sums
        t_p = time_call(f_p, *argsets, repeats=args.repeats)
        if f_c is not None:
            t_c = time_call(f_c, *argsets, repeats=args.repeats)
            print(f"{kind:<16} {pat.name:<10} {n:>4} {t_c:>11.4f}s {t_p:>11.4f}s {t_p / t_c:>8.1f}x")
        else:
            print(f"{kind:<16} {pat.name:<10} {n:>4} {'-':>12} {t_p:>11.4f}s {'-':>9}")


if __name__ == "__main__":
    main()
