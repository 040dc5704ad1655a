"""Potentials and checks of their admissibility for an impulsive system.

Every potential reads one "angle" coordinate ``a`` in ``[0, 1)`` of a point:
the coordinate itself on the circle, the first coordinate on the torus, the
height fraction ``h / roof`` on a suspension and the normalised position on an
interval.  A constant potential ignores it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .geometry import Space, SpaceKind


def angle_coordinate(space: Space, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if space.kind is SpaceKind.SUSPENSION:
        return x[..., 1] / space.roof
    if space.kind is SpaceKind.INTERVAL:
        return (x[..., 0] - space.low) / (space.high - space.low)
    return x[..., 0]


class Potential:
    """Base class: subclasses implement :meth:`of_angle`."""

    jump_compatible = False

    def of_angle(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, space: Space, x) -> np.ndarray:
        return self.of_angle(angle_coordinate(space, x))

    @property
    def is_constant(self) -> bool:
        return False

    def sup_norm(self) -> float:
        a = np.linspace(0.0, 1.0, 4097)
        return float(np.max(np.abs(self.of_angle(a))))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Potential):
    c: float = 0.0
    jump_compatible = True

    def of_angle(self, a):
        return np.full(np.shape(a), float(self.c))

    @property
    def is_constant(self):
        return True

    def sup_norm(self):
        return abs(float(self.c))

    def to_dict(self):
        return {"kind": "constant", "c": self.c}


@dataclass(frozen=True)
class FourierCircle(Potential):
    """``c0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)``, terms given as ``(k, a_k, b_k)``."""

    terms: tuple[tuple[int, float, float], ...] = ((1, 0.0, 1.0),)
    constant: float = 0.0
    jump_compatible: bool = False

    def __post_init__(self):
        terms = tuple((int(k), float(a), float(b)) for k, a, b in self.terms)
        if any(k < 1 for k, _, _ in terms):
            raise InvalidInputError("Fourier frequencies must be >= 1")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def sine(cls, jump_compatible: bool = True) -> "FourierCircle":
        return cls(((1, 0.0, 1.0),), 0.0, jump_compatible)

    def of_angle(self, a):
        a = np.asarray(a, dtype=float)
        out = np.full(a.shape, float(self.constant))
        for k, ca, cb in self.terms:
            w = 2.0 * np.pi * k * a
            if ca:
                out = out + ca * np.cos(w)
            if cb:
                out = out + cb * np.sin(w)
        return out

    def sup_norm(self):
        return abs(self.constant) + sum(math.hypot(a, b) for _, a, b in self.terms)

    def mean(self) -> float:
        return float(self.constant)

    def to_dict(self):
        return {"kind": "fourier", "terms": [list(t) for t in self.terms],
                "constant": self.constant, "jump_compatible": self.jump_compatible}


@dataclass(frozen=True, eq=False)
class Tabulated(Potential):
    """Piecewise-linear interpolation of node values; periodic when ``periodic`` is set."""

    nodes: np.ndarray = field(default_factory=lambda: np.array([0.0]))
    values: np.ndarray = field(default_factory=lambda: np.array([0.0]))
    periodic: bool = True
    jump_compatible: bool = False

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=float).ravel()
        if len(nodes) != len(vals) or len(nodes) == 0:
            raise InvalidInputError("tabulated potential needs equally many nodes and values")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidInputError("tabulated nodes must be strictly increasing")
        if self.periodic and (nodes[0] < 0 or nodes[-1] >= 1):
            raise InvalidInputError("periodic nodes must lie in [0, 1)")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", vals)

    def of_angle(self, a):
        a = np.asarray(a, dtype=float)
        if self.periodic:
            xp = np.concatenate([self.nodes, [self.nodes[0] + 1.0]])
            fp = np.concatenate([self.values, [self.values[0]]])
            a = np.mod(a - self.nodes[0], 1.0) + self.nodes[0]
            return np.interp(a, xp, fp)
        return np.interp(a, self.nodes, self.values)

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def to_dict(self):
        return {"kind": "tabulated", "nodes": self.nodes.tolist(), "values": self.values.tolist(),
                "periodic": self.periodic, "jump_compatible": self.jump_compatible}


def eval_potential(f: Potential, space: Space, x):
    """``f(x)``: a float for one point, an array for an array of points."""
    x = np.asarray(x, dtype=float)
    if x.ndim <= 1:
        return float(f(space, space.normalize(x)[None, :])[0])
    return f(space, x)


@dataclass
class JumpCompatibilityReport:
    passed: bool
    worst: float
    worst_point: np.ndarray | None

    def __str__(self):
        return f"jump compatibility: {'pass' if self.passed else 'fail'}, max |f(x) - f(I(x))| = {self.worst:.3g}"


def check_jump_compatible(f: Potential, sys, tol: float = 1e-12) -> JumpCompatibilityReport:
    """Exact check of ``f(x) = f(I(x))`` over the finite jump set."""
    if not sys.has_impulses or f.is_constant:
        return JumpCompatibilityReport(True, 0.0, None)
    space = sys.space
    gaps = np.abs(f(space, sys.jumps.points) - f(space, sys.impulse.images))
    j = int(np.argmax(gaps))
    return JumpCompatibilityReport(bool(gaps[j] <= tol), float(gaps[j]), sys.jumps.points[j].copy())


@dataclass
class DistortionReport:
    K_hat: float
    table: list[tuple[float, float]]  # (t, max discrepancy up to t)
    growing: bool
    pairs_used: int

    def __str__(self):
        trend = "growing" if self.growing else "no growth trend"
        return f"bounded distortion probe: K_hat = {self.K_hat:.4g} over {self.pairs_used} pairs ({trend})"


def probe_bounded_distortion(f: Potential, sys, eps: float, trials: int, t_max: float = 50.0,
                             dt: float = 0.01, seed: int = 0) -> DistortionReport:
    """Empirical constant for the bounded-distortion condition.

    Pairs start ``eps/2`` apart; a pair is followed while both orbits stay
    within ``eps`` of each other at sample times whose points lie outside the
    ``eps``-neighbourhood of ``D``.  The report records the largest
    discrepancy of the running integrals, per checkpoint time.
    """
    from .impulsive import impulsive_trajectory
    from .pressure import _cumulative_integrals

    if not eps > 0:
        raise InvalidInputError("eps must be positive")
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    checkpoints = [t for t in (1, 2, 5, 10, 20, 50, 100, 200) if t <= t_max] or [t_max]
    if f.is_constant:
        return DistortionReport(0.0, [(float(t), 0.0) for t in checkpoints], False, trials)
    space = sys.space
    rng = np.random.default_rng(seed)
    ts = np.arange(0.0, t_max + 0.5 * dt, dt)
    worst = np.zeros(len(checkpoints))
    used = 0
    for _ in range(trials):
        x = space.random_points(1, rng)[0]
        y = x.copy()
        y[0] = x[0] + 0.5 * eps
        try:
            y = space.normalize(y)
        except InvalidInputError:
            continue
        rx = impulsive_trajectory(sys, x, t_max)
        ry = impulsive_trajectory(sys, y, t_max)
        sx, sy = rx.state_at(ts), ry.state_at(ts)
        near = np.zeros(len(ts), dtype=bool)
        if sys.has_impulses:
            for d in sys.jumps.points:
                near |= (space.distance(sx, d) < eps) | (space.distance(sy, d) < eps)
        bad = (space.distance(sx, sy) > eps) & ~near
        stop = ts[np.argmax(bad)] if bad.any() else t_max
        ix = _cumulative_integrals(sys, f, rx, checkpoints, dt)
        iy = _cumulative_integrals(sys, f, ry, checkpoints, dt)
        disc = np.abs(ix - iy)
        for c, t in enumerate(checkpoints):
            if t <= stop:
                worst[c] = max(worst[c], disc[c])
        used += 1
    table = [(float(t), float(w)) for t, w in zip(checkpoints, np.maximum.accumulate(worst))]
    vals = [w for _, w in table]
    growing = len(vals) >= 3 and vals[-1] > 2.0 * max(vals[len(vals) // 2 - 1], 1e-12)
    return DistortionReport(float(max(vals)), table, bool(growing), used)
