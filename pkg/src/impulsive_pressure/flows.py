"""Continuous base semiflows.

Every flow answers two questions: where a point goes after time ``t``
(:meth:`Semiflow.evaluate`) and where one point is at many times
(:meth:`Semiflow.orbit`, the vectorised path used by trajectories and the
orbit banks of the estimators).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError
from .geometry import Space, SpaceKind, _wrap01


def _times(ts) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise InvalidInputError("flow times must be finite and >= 0")
    return ts


class Semiflow:
    """Base class; subclasses implement :meth:`orbit`."""

    space: Space
    closed_form = True

    def orbit(self, x, ts) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, t: float, x) -> np.ndarray:
        if t < 0:
            raise InvalidInputError("negative time")
        x = self.space.normalize(x)
        if t == 0:
            return x
        return self.orbit(x, [t])[0]

    def velocity(self, x) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class RotationCircle(Semiflow):
    speed: float = 1.0
    space: Space = field(default_factory=Space.circle)

    def orbit(self, x, ts):
        ts = _times(ts)
        x0 = float(np.asarray(x, dtype=float).ravel()[0])
        return _wrap01(x0 + self.speed * ts)[:, None]

    def velocity(self, x):
        return np.array([self.speed])

    def to_dict(self):
        return {"kind": "rotation", "speed": self.speed}


@dataclass(frozen=True)
class TranslationInterval(Semiflow):
    """Constant-speed motion on an interval, stopping at whichever endpoint it reaches."""

    speed: float = 1.0
    space: Space = field(default_factory=Space.interval)

    def __post_init__(self):
        if self.space.kind is not SpaceKind.INTERVAL:
            raise InvalidInputError("TranslationInterval lives on an interval space")

    def orbit(self, x, ts):
        ts = _times(ts)
        x0 = float(np.asarray(x, dtype=float).ravel()[0])
        return np.clip(x0 + self.speed * ts, self.space.low, self.space.high)[:, None]

    def velocity(self, x):
        return np.array([self.speed])

    def to_dict(self):
        return {"kind": "translation", "speed": self.speed}


@dataclass(frozen=True)
class SuspensionDoubling(Semiflow):
    """Unit vertical speed; crossing the roof applies the doubling map to the base."""

    space: Space = field(default_factory=Space.suspension)

    def __post_init__(self):
        if self.space.kind is not SpaceKind.SUSPENSION:
            raise InvalidInputError("SuspensionDoubling lives on a suspension space")

    @property
    def roof(self) -> float:
        return self.space.roof

    def orbit(self, x, ts):
        ts = _times(ts)
        u0, h0 = np.asarray(x, dtype=float).ravel()[:2]
        r = self.roof
        total = h0 + ts
        n = np.floor(total / r)
        h = total - n * r
        over = h >= r
        n[over] += 1
        h[over] -= r
        under = h < 0
        n[under] -= 1
        h[under] += r
        # ldexp is exact, so the only precision loss is the doubling itself
        u = _wrap01(np.ldexp(u0, n.astype(np.int64)))
        return np.column_stack([u, h])

    def velocity(self, x):
        return np.array([0.0, 1.0])

    def to_dict(self):
        return {"kind": "suspension"}


def _field_constant(params):
    v = np.asarray(params.get("velocity", [1.0]), dtype=float)
    return lambda x: np.broadcast_to(v, np.shape(x)).copy()


def _field_circle_sine(params):
    a = float(params.get("a", 1.0))
    b = float(params.get("b", 0.5))
    return lambda x: a + b * np.sin(2.0 * np.pi * x)


VECTOR_FIELDS: dict[str, Callable[[dict], Callable[[np.ndarray], np.ndarray]]] = {
    "constant": _field_constant,
    "circle_sine": _field_circle_sine,
}


@dataclass(frozen=True)
class OdeField(Semiflow):
    """Flow of an autonomous vector field, integrated with fixed-step RK4.

    ``evaluate(t)`` takes ``floor(t / step)`` full steps followed by one
    partial step of the remaining time.
    """

    field_name: str = "constant"
    params: dict = field(default_factory=dict)
    step: float = 0.01
    space: Space = field(default_factory=Space.circle)
    closed_form = False

    def __post_init__(self):
        if self.field_name not in VECTOR_FIELDS:
            raise InvalidInputError(f"unknown vector field {self.field_name!r}")
        if not self.step > 0:
            raise InvalidInputError("ODE step must be positive")
        object.__setattr__(self, "_f", VECTOR_FIELDS[self.field_name](dict(self.params)))

    def __hash__(self):
        return hash((self.field_name, json.dumps(self.params, sort_keys=True), self.step, self.space))

    def _wrap(self, x):
        if self.space.kind in (SpaceKind.CIRCLE, SpaceKind.TORUS2):
            return _wrap01(x)
        if self.space.kind is SpaceKind.INTERVAL:
            return np.clip(x, self.space.low, self.space.high)
        return x

    def _rk4(self, x, h):
        f = self._f
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        return self._wrap(x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))

    def orbit(self, x, ts):
        ts = _times(ts)
        x0 = self.space.normalize(x)
        h = self.step
        q = ts / h
        n_full = np.floor(q + 1e-12).astype(np.int64)
        rem = ts - n_full * h
        rem[rem < 0] = 0.0
        n_max = int(n_full.max()) if len(ts) else 0
        states = np.empty((n_max + 1, self.space.dim))
        states[0] = x0
        for k in range(n_max):
            states[k + 1] = self._rk4(states[k], h)
        base = states[n_full]
        out = base.copy()
        part = rem > 0
        if np.any(part):
            out[part] = self._rk4(base[part], rem[part][:, None])
        return out

    def velocity(self, x):
        return np.asarray(self._f(np.asarray(x, dtype=float)), dtype=float).reshape(self.space.dim)

    def to_dict(self):
        return {"kind": "ode", "field": self.field_name, "params": dict(self.params), "step": self.step}


def evaluate(flow: Semiflow, t: float, x) -> np.ndarray:
    """``phi_t(x)``."""
    return flow.evaluate(t, x)


def sample_times(T: float, dt: float) -> np.ndarray:
    """``0, dt, 2 dt, ...`` strictly below ``T``, followed by ``T`` itself."""
    if not T > 0 or not dt > 0 or dt > T * (1 + 1e-12):
        raise InvalidInputError("need T > 0 and 0 < dt <= T")
    n = math.ceil(T / dt - 1e-9)
    ts = np.arange(n + 1) * dt
    ts[-1] = T
    return ts


def sample_orbit(flow: Semiflow, x, T: float, dt: float) -> list[tuple[float, np.ndarray]]:
    ts = sample_times(T, dt)
    states = flow.orbit(flow.space.normalize(x), ts)
    return [(float(t), s) for t, s in zip(ts, states)]
