"""Pure numpy fallback for the compiled kernels; same arithmetic, same results."""
from __future__ import annotations

import numpy as np

_CHUNK = 64


def pair_distance(a: np.ndarray, b: np.ndarray, code: int) -> np.ndarray:
    """Distances between metric coordinates, evaluated in the kernel's operation order."""
    if code == 0 or code == 2:
        d = np.abs(a - b)
        d = d - np.floor(d)
        d = np.minimum(d, 1.0 - d)
        if code == 0:
            return d[..., 0]
        return np.sqrt(d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1])
    if code == 1:
        return np.abs(a[..., 0] - b[..., 0])
    acc = np.zeros(np.broadcast_shapes(a.shape, b.shape)[:-1])
    for k in range(a.shape[-1]):
        d = a[..., k] - b[..., k]
        acc = acc + d * d
    return np.sqrt(acc)


def _stage_values(bank, i, js, code, stage, m, starts):
    """Stage metric for every window: array of shape ``(len(js), len(starts))``."""
    if stage == 0:
        return pair_distance(bank[i, starts][None], bank[js][:, starts], code)
    idx = starts[:, None] + np.arange(m)[None, :]  # (K, m)
    xi = bank[i][idx]  # (K, m, dim)
    xj = bank[js][:, idx]  # (nj, K, m, dim)
    if stage == 1:
        return pair_distance(xi[None], xj, code).min(axis=-1)
    best = np.full((len(js), len(starts)), np.inf)
    for b in range(m):
        d = pair_distance(xi[None], xj[:, :, b : b + 1, :], code)  # (nj, K, m)
        np.minimum(best, d.min(axis=-1), out=best)
    return best


def stage_profiles(bank, i, js, code, stage, m, starts, checkpoints, cap, out):
    bank = np.asarray(bank, dtype=float)
    js = np.asarray(js, dtype=np.intp)
    starts = np.asarray(starts, dtype=np.intp)
    checkpoints = np.asarray(checkpoints, dtype=np.intp)
    if len(js) == 0 or len(checkpoints) == 0:
        return
    if len(starts) and starts[-1] + (m if stage else 1) > bank.shape[1]:
        raise ValueError("orbit bank too short for the requested windows")
    for lo in range(0, len(js), _CHUNK):
        sub = js[lo : lo + _CHUNK]
        vals = _stage_values(bank, i, sub, code, stage, m, starts)
        run = np.maximum.accumulate(vals, axis=1)
        # freeze the running maximum once it reaches the cap, as the kernel stops there
        hit = run >= cap
        first = np.where(hit.any(axis=1), hit.argmax(axis=1), run.shape[1])
        for r in np.flatnonzero(first < run.shape[1]):
            run[r, first[r]:] = run[r, first[r]]
        out[lo : lo + len(sub)] = run[:, checkpoints - 1]
