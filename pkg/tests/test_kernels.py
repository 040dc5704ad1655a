import os
import subprocess
import sys

import numpy as np
import pytest

from impulsive_pressure import kernels
from impulsive_pressure._pykernels import pair_distance

try:
    from impulsive_pressure import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")

DIMS = {0: 1, 1: 1, 2: 2, 3: 6}


def _bank(code, n=12, ns=300, seed=0):
    rng = np.random.default_rng(seed)
    dim = DIMS[code]
    if code in (0, 2):
        # slow drift with occasional jumps, like circle orbits
        steps = rng.normal(0.01, 0.004, size=(n, ns, dim))
        steps[rng.random((n, ns)) < 0.01] += 0.37
        return np.ascontiguousarray(np.mod(np.cumsum(steps, axis=1), 1.0))
    return np.ascontiguousarray(rng.random((n, ns, dim)))


@needs_ext
@pytest.mark.parametrize("code", [0, 1, 2, 3])
@pytest.mark.parametrize("stage", [kernels.STAGE_CLASSICAL, kernels.STAGE_HAT, kernels.STAGE_BAR])
@pytest.mark.parametrize("cap", [np.inf, 0.3])
def test_backends_bit_identical(code, stage, cap):
    data = _bank(code)
    m = 1 if stage == kernels.STAGE_CLASSICAL else 8
    starts = np.union1d(np.arange(0, 280, 3), [100, 200, 280]).astype(np.intp)
    cps = np.searchsorted(starts, [100, 200, 280], side="right").astype(np.intp)
    for i in (0, 5):
        js = np.arange(data.shape[0], dtype=np.intp)
        a = np.empty((len(js), len(cps)))
        b = np.empty_like(a)
        _ckernels.stage_profiles(data, i, js, code, stage, m, starts, cps, cap, a)
        kernels.python_stage_profiles(data, i, js, code, stage, m, starts, cps, cap, b)
        assert np.array_equal(a, b)
        assert np.all(np.diff(a, axis=1) >= 0)
        assert np.all(a[js == i] == 0)


def test_python_stage_values_brute_force():
    data = _bank(0, n=3, ns=60)
    m = 5
    starts = np.arange(0, 50, 2, dtype=np.intp)
    cps = np.array([len(starts)], dtype=np.intp)
    out = np.empty((1, 1))
    for stage in (0, 1, 2):
        kernels.python_stage_profiles(data, 0, np.array([1], dtype=np.intp), 0, stage,
                                      1 if stage == 0 else m, starts, cps, np.inf, out)
        best = 0.0
        for t in starts:
            if stage == 0:
                v = pair_distance(data[0, t], data[1, t], 0)
            elif stage == 1:
                v = min(pair_distance(data[0, t + k], data[1, t + k], 0) for k in range(m))
            else:
                v = min(pair_distance(data[0, t + k], data[1, t + l], 0) for k in range(m) for l in range(m))
            best = max(best, float(v))
        assert out[0, 0] == best


def test_pair_distance_codes():
    a, b = np.array([0.1]), np.array([0.9])
    assert pair_distance(a, b, 0) == pytest.approx(0.2)
    assert pair_distance(a, b, 1) == pytest.approx(0.8)
    assert pair_distance(np.array([0.0, 0.0]), np.array([0.5, 0.5]), 2) == pytest.approx(np.sqrt(0.5))
    assert pair_distance(np.array([0.0, 0.0]), np.array([3.0, 4.0]), 3) == 5.0


def test_backend_env_override():
    env = dict(os.environ, IMPULSIVE_PRESSURE_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "from impulsive_pressure import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_default_backend_is_compiled():
    if os.environ.get("IMPULSIVE_PRESSURE_BACKEND", "").lower() == "python":
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "cython"
