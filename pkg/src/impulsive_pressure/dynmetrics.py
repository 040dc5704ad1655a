"""Time-shift pseudometrics and Bowen-type dynamical distances.

``d_hat`` compares two orbits at a common time shift ``s`` taken from the
grid ``{k delta / m : k < m}``; ``d_bar`` lets the two shifts differ.  Both
are evaluated literally at grid points, so they over-estimate the infima
over ``[0, delta)`` by an amount that shrinks with ``m``.

These functions are the direct (and slow) route; the estimators in
:mod:`impulsive_pressure.pressure` compute the same quantities from orbit
banks with the compiled kernel.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .flows import Semiflow, sample_times
from .impulsive import MEMBER_TOL, ImpulsiveSystem, Region, classify_region, impulsive_trajectory, psi


class MetricKind(str, enum.Enum):
    CLASSICAL = "classical"
    HAT = "hat"
    BAR = "bar"


@dataclass(frozen=True)
class PseudoMetricParams:
    delta: float
    m: int = 32
    t_grid_step: float | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise InvalidInputError("delta must be positive")
        if int(self.m) != self.m or self.m < 2:
            raise InvalidInputError("s-grid count m must be an integer >= 2")
        if self.t_grid_step is None:
            object.__setattr__(self, "t_grid_step", self.delta / 4)
        if not 0 < self.t_grid_step <= self.delta / 2 * (1 + 1e-12):
            raise InvalidInputError("t_grid_step must lie in (0, delta/2]")

    @property
    def h(self) -> float:
        """Spacing of the shift grid."""
        return self.delta / self.m


def _space(system):
    return system.space


def _states(system, x, ts: np.ndarray) -> np.ndarray:
    """States of the (impulsive) orbit of ``x`` at the nonnegative times ``ts``."""
    x = _space(system).normalize(x)
    if isinstance(system, Semiflow):
        return system.orbit(x, ts)
    T = float(ts.max())
    if T <= 0:
        return np.repeat(x[None, :], len(ts), axis=0)
    return impulsive_trajectory(system, x, T).state_at(ts)


def _on_grid(t: float, h: float):
    q = t / h
    k = round(q)
    return k if abs(q - k) <= 1e-9 * max(1.0, abs(q)) else None


def _shifted(t: float, h: float, m: int) -> np.ndarray:
    """``t + k h`` for ``k < m``, as integer multiples of ``h`` when ``t`` sits on that grid."""
    k = _on_grid(t, h)
    if k is not None:
        return (k + np.arange(m)) * h
    return t + np.arange(m) * h


def _stage(system, params, kind, tpoints, x, y) -> np.ndarray:
    """Stage metric at each base time in ``tpoints``."""
    space = _space(system)
    m = 1 if kind is MetricKind.CLASSICAL else params.m
    grid = np.array([_shifted(float(t), params.h, m) for t in tpoints])  # (nt, m)
    flat = grid.ravel()
    sx = _states(system, x, flat).reshape(len(tpoints), m, -1)
    sy = _states(system, y, flat).reshape(len(tpoints), m, -1)
    if kind is MetricKind.BAR:
        d = space.distance(sx[:, :, None, :], sy[:, None, :, :])
        return d.reshape(len(tpoints), -1).min(axis=1)
    return space.distance(sx, sy).min(axis=1)


def d_hat(system, params: PseudoMetricParams, x, y) -> float:
    """``min_k d(psi_{s_k} x, psi_{s_k} y)`` over the shift grid."""
    return float(_stage(system, params, MetricKind.HAT, [0.0], x, y)[0])


def d_bar(system, params: PseudoMetricParams, x, y) -> float:
    """``min_{k,l} d(psi_{s_k} x, psi_{s_l} y)`` over the shift grid."""
    return float(_stage(system, params, MetricKind.BAR, [0.0], x, y)[0])


def dyn_dist(kind, system, params: PseudoMetricParams, T: float, x, y) -> float:
    """Largest stage distance of the orbits of ``x`` and ``y`` over ``{0, step, ..., T}``.

    ``>= eps`` certifies separation and ``< eps`` spanning at this resolution.
    """
    kind = MetricKind(kind)
    if not T > 0:
        raise InvalidInputError("T must be positive")
    step = params.t_grid_step
    tpoints = sample_times(T, step) if step <= T else np.array([0.0, T])
    return float(_stage(system, params, kind, tpoints, x, y).max())


# ---------------------------------------------------------------------------
# quotient space
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EquivalenceSample:
    """Finite sample of ``X`` together with identified pairs (indices into ``base_points``)."""

    base_points: np.ndarray
    relation_pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.base_points, dtype=float)).copy()
        pts.setflags(write=False)
        object.__setattr__(self, "base_points", pts)
        pairs = set()
        for a, b in self.relation_pairs:
            if not (0 <= a < len(pts) and 0 <= b < len(pts)):
                raise InvalidInputError("relation pair refers to a missing point")
            pairs.add((int(a), int(b)))
            pairs.add((int(b), int(a)))
        pairs.update((i, i) for i in range(len(pts)))
        object.__setattr__(self, "relation_pairs", tuple(sorted(pairs)))

    @classmethod
    def from_system(cls, sys: ImpulsiveSystem, base_points=()) -> "EquivalenceSample":
        """Base points plus ``D`` and ``I(D)``, related by ``x ~ I(x)`` and ``I(x) = I(y)``."""
        space = sys.space
        base = [space.normalize(p) for p in np.asarray(base_points, dtype=float).reshape(-1, space.dim)]
        pairs = []
        if sys.has_impulses:
            D, ID = sys.jumps.points, sys.impulse.images
            n0 = len(base)
            k = len(D)
            base.extend(D)
            base.extend(ID)
            for j in range(k):
                pairs.append((n0 + j, n0 + k + j))
                for l in range(j + 1, k):
                    if float(space.distance(ID[j], ID[l])) == 0.0:
                        pairs.append((n0 + j, n0 + l))
        return cls(np.array(base).reshape(-1, space.dim), tuple(pairs))


def _dijkstra(W: np.ndarray, src: int, dst: int) -> float:
    n = len(W)
    dist = np.full(n, np.inf)
    dist[src] = 0.0
    done = np.zeros(n, dtype=bool)
    for _ in range(n):
        cand = np.where(done, np.inf, dist)
        u = int(np.argmin(cand))
        if not np.isfinite(cand[u]) or u == dst:
            break
        done[u] = True
        np.minimum(dist, dist[u] + W[u], out=dist)
    return float(dist[dst])


def quotient_distance(sample: EquivalenceSample, space, x, y) -> float:
    """Shortest chain from ``x`` to ``y`` through the sample, with identified pairs free.

    An upper bound on the chain metric of the quotient; never more than ``d(x, y)``.
    """
    x = space.normalize(x)
    y = space.normalize(y)
    nodes = np.vstack([sample.base_points, x[None], y[None]])
    W = space.distance(nodes[:, None, :], nodes[None, :, :])
    for a, b in sample.relation_pairs:
        W[a, b] = 0.0
    n = len(nodes)
    return _dijkstra(W, n - 2, n - 1)


def representative(sys: ImpulsiveSystem, y) -> np.ndarray:
    """The member of the class of ``y`` that lies in ``X_xi``: ``I(d)`` for ``y = d`` in ``D``."""
    y = sys.space.normalize(y)
    if sys.has_impulses:
        dd = sys.space.distance(sys.jumps.points, y)
        j = int(np.argmin(dd))
        if dd[j] <= MEMBER_TOL:
            return sys.impulse.images[j].copy()
    return y


def project_and_flow_quotient(sys: ImpulsiveSystem, sample: EquivalenceSample, t: float, x) -> np.ndarray:
    """Representative of the class of ``psi_t(x)`` for ``x`` in ``X_xi``."""
    if t < 0:
        raise InvalidInputError("negative time")
    if classify_region(sys, x) is not Region.IN_X_XI:
        raise DomainError("the quotient flow is defined on X_xi")
    return representative(sys, psi(sys, t, x))
