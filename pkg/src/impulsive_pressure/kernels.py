"""Backend selection for the pairwise kernels.

The compiled extension is used when it imports; setting the environment
variable ``IMPULSIVE_PRESSURE_BACKEND=python`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("IMPULSIVE_PRESSURE_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass

STAGE_CLASSICAL, STAGE_HAT, STAGE_BAR = 0, 1, 2


def stage_profiles(bank, i, js, code, stage, m, starts, checkpoints, cap, out):
    """Fill ``out[r, c]`` with the running max of the stage metric, see the compiled kernel."""
    _impl.stage_profiles(bank, i, js, code, stage, m, starts, checkpoints, cap, out)


def python_stage_profiles(bank, i, js, code, stage, m, starts, checkpoints, cap, out):
    _pykernels.stage_profiles(bank, i, js, code, stage, m, starts, checkpoints, cap, out)


pair_distance = _pykernels.pair_distance
