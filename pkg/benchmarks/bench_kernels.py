"""Compare the compiled pairwise kernel with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 200] [--repeat 3]

Times one full row sweep (every stage, every pair ``(i, j)`` with ``j > i``
for a handful of rows ``i``) on orbits of the impulsive circle and checks that
both backends return identical arrays.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from impulsive_pressure import kernels
from impulsive_pressure.geometry import regular_grid
from impulsive_pressure.pressure import EstimatorKind, PressureEstimator, Schedule
from impulsive_pressure.systems import get_system

try:
    from impulsive_pressure import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=200, help="grid points")
    p.add_argument("--rows", type=int, default=4, help="rows i to sweep")
    p.add_argument("--T", type=float, default=20.0)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    sys_ = get_system("impulsive_circle")
    sched = Schedule((args.T,), (0.05,), (0.1,), regular_grid(sys_.space, args.n), m=32)
    est = PressureEstimator(sys_, sched, [EstimatorKind.BAR_S])
    est._build_bank()
    data = est.bank.data
    cache = est.cache(EstimatorKind.BAR_S.metric, 0.1)
    m, starts, checkpoints = cache.m, cache.starts, cache.checkpoints
    code = est.bank.code
    rows = np.linspace(0, args.n - 2, args.rows).astype(int)

    print(f"backend selected at import: {kernels.BACKEND}")
    print(f"n={args.n} samples/orbit={data.shape[1]} windows={len(starts)} m={m}")
    print(f"{'stage':<10}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}  identical")
    for stage, label in ((kernels.STAGE_CLASSICAL, "classical"), (kernels.STAGE_HAT, "hat"),
                         (kernels.STAGE_BAR, "bar")):
        outs = {}

        def run(impl, key):
            res = []
            for i in rows:
                js = np.arange(i + 1, args.n, dtype=np.intp)
                out = np.empty((len(js), len(checkpoints)))
                impl(data, int(i), js, code, stage, m, starts, checkpoints, np.inf, out)
                res.append(out)
            outs[key] = res

        tp = _best(lambda: run(kernels.python_stage_profiles, "py"), args.repeat)
        if _ckernels is None:
            print(f"{label:<10}{tp:12.4f}{'n/a':>12}{'':>10}  -")
            continue
        tc = _best(lambda: run(_ckernels.stage_profiles, "c"), args.repeat)
        same = all(np.array_equal(a, b) for a, b in zip(outs["py"], outs["c"]))
        print(f"{label:<10}{tp:12.4f}{tc:12.4f}{tp / tc:10.1f}  {same}")


if __name__ == "__main__":
    main()
