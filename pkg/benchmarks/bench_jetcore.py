"""Compare the compiled and pure-Python jet kernels.

Run with ``python3 benchmarks/bench_jetcore.py``.  Reports per-call time of
the truncated product for a few batch sizes, a full curvature evaluation,
and the largest difference between the two backends' results.
"""
from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from sasaki3 import _jetcore_py
from sasaki3.jets import _product_table, ncoef

try:
    _compiled = importlib.import_module("sasaki3._jetcore")
except ImportError:  # pragma: no cover
    _compiled = None


def timeit(fn, repeat: int) -> float:
    fn()
    best = np.inf
    for _ in range(3):
        t = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - t) / repeat)
    return best


def bench_mul(rows: int, nvars: int = 3, order: int = 3, repeat: int = 200):
    rng = np.random.default_rng(0)
    n = ncoef(nvars, order)
    a, b = rng.standard_normal((rows, n)), rng.standard_normal((rows, n))
    ia, ib, ic = _product_table(nvars, order)
    out = {"python": timeit(lambda: _jetcore_py.mul(a, b, ia, ib, ic, n), repeat)}
    if _compiled is not None:
        out["compiled"] = timeit(lambda: _compiled.mul(a, b, ia, ib, ic, n), repeat)
        out["max_diff"] = float(np.abs(_compiled.mul(a, b, ia, ib, ic, n) - _jetcore_py.mul(a, b, ia, ib, ic, n)).max())
    return out


def bench_curvature(repeat: int = 20):
    from sasaki3 import jets
    from sasaki3.curvature import curvature_jets
    from sasaki3.eta_einstein import family_structure

    s = family_structure(1.0)
    p = np.array([0.1, 0.2, -0.3])
    out = {}
    saved = jets._core
    for name, kern in (("python", _jetcore_py), ("compiled", _compiled)):
        if kern is None:
            continue
        jets._core = kern
        out[name] = timeit(lambda: curvature_jets(s.metric, p, 3), repeat)
    jets._core = saved
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    print(f"{'case':<26}{'python [us]':>14}{'compiled [us]':>16}{'speed-up':>10}")
    for rows in (1, 27, 243, 2187):
        r = bench_mul(rows, repeat=args.repeat)
        c = r.get("compiled", np.nan)
        print(f"{'mul rows=' + str(rows):<26}{1e6 * r['python']:>14.2f}{1e6 * c:>16.2f}{r['python'] / c:>10.2f}"
              f"   max|diff|={r.get('max_diff', np.nan):.1e}")
    r = bench_curvature()
    c = r.get("compiled", np.nan)
    print(f"{'curvature_jets order 3':<26}{1e6 * r['python']:>14.0f}{1e6 * c:>16.0f}{r['python'] / c:>10.2f}")


if __name__ == "__main__":
    main()
