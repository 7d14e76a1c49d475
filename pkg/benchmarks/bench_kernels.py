#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

Times the kick kernel and both Hermitian eigensolvers on each backend
that can be imported, with numpy's LAPACK eigh as the reference row.
Run from anywhere; prints a fixed-width table to stdout.
"""

import argparse
import time

import numpy as np

from scramble.dynamics import ModelParams, _kick_tables
from scramble.kernels import _py

try:
    from scramble.kernels import _core
except ImportError:
    _core = None


def best_of(repeat, fn, *args):
    out = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        out = min(out, time.perf_counter() - t0)
    return out


def bench_kick(repeat, sites):
    rng = np.random.default_rng(7)
    rows = []
    for n in sites:
        params = ModelParams(n=n, j=1.0, hx=1.0, hz=1.0, tau=0.3)
        zphase, xphase = _kick_tables(params)
        psi = rng.normal(size=1 << (n + 1)) * (1.0 + 0.0j)
        base = best_of(repeat, lambda: _py.apply_kick(psi.copy(), zphase,
                                                      xphase, n))
        row = [f"kick n={n}", base, None]
        if _core is not None:
            row[2] = best_of(repeat, lambda: _core.apply_kick(psi.copy(),
                                                              zphase,
                                                              xphase, n))
        rows.append(row)
    return rows


def bench_eigh(repeat, dims_jacobi, dims_ql):
    rng = np.random.default_rng(8)
    rows = []

    def hermitian(dim):
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return (m + m.conj().T) / 2.0

    for dim in dims_jacobi:
        h = hermitian(dim)
        rows.append([f"jacobi {dim}x{dim}",
                     best_of(repeat, _py.jacobi_eigh, h),
                     None if _core is None
                     else best_of(repeat, _core.jacobi_eigh, h)])
        rows.append([f"lapack {dim}x{dim}",
                     best_of(repeat, np.linalg.eigh, h), None])
    for dim in dims_ql:
        h = hermitian(dim)
        rows.append([f"ql {dim}x{dim}",
                     best_of(repeat, _py.eigh_ql, h),
                     None if _core is None
                     else best_of(repeat, _core.eigh_ql, h)])
        rows.append([f"lapack {dim}x{dim}",
                     best_of(repeat, np.linalg.eigh, h), None])
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="take the best of this many runs")
    parser.add_argument("--kick-sites", type=int, nargs="+",
                        default=[8, 10, 12])
    args = parser.parse_args()

    if _core is None:
        print("compiled backend not importable; python timings only\n")
    rows = bench_kick(args.repeat, args.kick_sites)
    rows += bench_eigh(args.repeat, dims_jacobi=(64, 128),
                       dims_ql=(256, 512))
    print(f"{'case':<18}{'python (ms)':>14}{'compiled (ms)':>16}"
          f"{'speedup':>10}")
    for name, py_t, core_t in rows:
        line = f"{name:<18}{py_t * 1e3:>14.3f}"
        if core_t is None:
            line += f"{'-':>16}{'-':>10}"
        else:
            line += f"{core_t * 1e3:>16.3f}{py_t / core_t:>10.1f}"
        print(line)


if __name__ == "__main__":
    main()
