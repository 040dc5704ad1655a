"""State spaces, their metrics and finite candidate grids.

Points are plain ``float64`` arrays whose last axis holds the chart
coordinates of the space:

* ``circle``: one coordinate in ``[0, 1)`` (unit circumference),
* ``interval``: one coordinate in ``[low, high]``,
* ``torus2``: two coordinates in ``[0, 1)``,
* ``suspension_doubling``: ``(u, h)`` with base coordinate ``u`` in ``[0, 1)``
  and height ``h`` in ``[0, roof)``; the roof is glued to the floor through the
  doubling map, ``(u, roof) ~ (2u mod 1, 0)``.

The suspension metric is the Euclidean distance between images under a
continuous injective map of the glued space into R^6 (see
:func:`suspension_embedding`).  It is an honest metric, locally comparable to
the flat product metric of the chart.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

TWO_PI = 2.0 * np.pi

# metric codes understood by the pairwise kernels
WRAP1, ABS1, WRAP2, EUCLID = 0, 1, 2, 3


class SpaceKind(str, enum.Enum):
    CIRCLE = "circle"
    INTERVAL = "interval"
    TORUS2 = "torus2"
    SUSPENSION = "suspension_doubling"


def _wrap01(a):
    a = np.mod(a, 1.0)
    # np.mod(-1e-18, 1.0) == 1.0
    return np.where(a >= 1.0, 0.0, a)


def _circle_gap(a, b):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    d = np.mod(d, 1.0)
    return np.minimum(d, 1.0 - d)


def suspension_embedding(points, roof):
    """Map suspension chart points ``(u, h)`` into R^6.

    With ``s = h / roof`` the components are the height circle
    ``roof/(2 pi) * (cos 2 pi s, sin 2 pi s)``, the blend
    ``((1 - s) e(u) + s e(2u)) / (2 pi)`` and the separator
    ``sin(pi s) e(u) / (2 pi)`` where ``e(v) = exp(2 pi i v)``.  The blend
    agrees on both sides of the roof gluing and the separator vanishes there,
    so the map is well defined and continuous on the glued space; the height
    circle plus the separator make it injective.
    """
    p = np.asarray(points, dtype=float)
    u, h = p[..., 0], p[..., 1]
    s = h / roof
    e1 = np.exp(1j * TWO_PI * u)
    e2 = e1 * e1
    blend = ((1.0 - s) * e1 + s * e2) / TWO_PI
    sep = np.sin(np.pi * s) * e1 / TWO_PI
    ring = roof / TWO_PI
    return np.stack(
        [
            ring * np.cos(TWO_PI * s),
            ring * np.sin(TWO_PI * s),
            blend.real,
            blend.imag,
            sep.real,
            sep.imag,
        ],
        axis=-1,
    )


@dataclass(frozen=True)
class Space:
    """A compact state space with its chart and metric."""

    kind: SpaceKind
    low: float = 0.0
    high: float = 1.0
    roof: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.kind is SpaceKind.INTERVAL and not self.high > self.low:
            raise InvalidInputError("interval needs high > low")
        if self.kind is SpaceKind.SUSPENSION and not self.roof > 0:
            raise InvalidInputError("suspension roof must be positive")

    @classmethod
    def circle(cls) -> "Space":
        return cls(SpaceKind.CIRCLE)

    @classmethod
    def interval(cls, low: float = 0.0, high: float = 1.0) -> "Space":
        return cls(SpaceKind.INTERVAL, low=float(low), high=float(high))

    @classmethod
    def torus2(cls) -> "Space":
        return cls(SpaceKind.TORUS2)

    @classmethod
    def suspension(cls, roof: float = 1.0) -> "Space":
        return cls(SpaceKind.SUSPENSION, roof=float(roof))

    @property
    def dim(self) -> int:
        return 1 if self.kind in (SpaceKind.CIRCLE, SpaceKind.INTERVAL) else 2

    @property
    def diameter(self) -> float:
        if self.kind is SpaceKind.CIRCLE:
            return 0.5
        if self.kind is SpaceKind.INTERVAL:
            return self.high - self.low
        if self.kind is SpaceKind.TORUS2:
            return float(np.sqrt(0.5))
        # crude bound: the embedding lives in a product of discs
        return float(2.0 * np.sqrt((self.roof / TWO_PI) ** 2 + 3.0 / TWO_PI**2))

    # -- points ---------------------------------------------------------
    def _check_shape(self, a: np.ndarray) -> None:
        if a.ndim == 0 or a.shape[-1] != self.dim:
            raise InvalidInputError(
                f"{self.kind.value} points need {self.dim} coordinate(s), got shape {a.shape}"
            )

    def normalize(self, coords) -> np.ndarray:
        """Reduce coordinates into the chart, raising on out-of-range values."""
        a = np.array(coords, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1)
        self._check_shape(a)
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("non-finite coordinates")
        if self.kind in (SpaceKind.CIRCLE, SpaceKind.TORUS2):
            return _wrap01(a)
        if self.kind is SpaceKind.INTERVAL:
            tol = 1e-12 * (self.high - self.low)
            if np.any(a < self.low - tol) or np.any(a > self.high + tol):
                raise InvalidInputError(f"point outside [{self.low}, {self.high}]")
            return np.clip(a, self.low, self.high)
        a[..., 0] = _wrap01(a[..., 0])
        h = a[..., 1]
        if np.any(h < 0.0) or np.any(h >= self.roof):
            raise InvalidInputError(f"suspension height must lie in [0, {self.roof})")
        return a

    def point(self, *coords) -> np.ndarray:
        if len(coords) == 1 and np.ndim(coords[0]) > 0:
            coords = tuple(np.asarray(coords[0], dtype=float).ravel())
        return self.normalize(np.array(coords, dtype=float))

    def contains(self, x) -> bool:
        try:
            self.normalize(x)
        except InvalidInputError:
            return False
        return True

    def offset(self, x, y) -> np.ndarray:
        """Chart displacement ``x - y`` taking the shortest wrap (base only for suspensions)."""
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        if self.kind in (SpaceKind.CIRCLE, SpaceKind.TORUS2):
            return d - np.round(d)
        if self.kind is SpaceKind.SUSPENSION:
            d = d.copy()
            d[..., 0] -= np.round(d[..., 0])
        return d

    # -- metric ---------------------------------------------------------
    @property
    def metric_code(self) -> int:
        return {
            SpaceKind.CIRCLE: WRAP1,
            SpaceKind.INTERVAL: ABS1,
            SpaceKind.TORUS2: WRAP2,
            SpaceKind.SUSPENSION: EUCLID,
        }[self.kind]

    def metric_coords(self, points) -> np.ndarray:
        """Coordinates in which the kernels evaluate distances."""
        p = np.asarray(points, dtype=float)
        if self.kind is SpaceKind.SUSPENSION:
            return suspension_embedding(p, self.roof)
        return p

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self._check_shape(x)
        self._check_shape(y)
        if self.kind is SpaceKind.CIRCLE:
            return _circle_gap(x[..., 0], y[..., 0])
        if self.kind is SpaceKind.INTERVAL:
            return np.abs(x[..., 0] - y[..., 0])
        if self.kind is SpaceKind.TORUS2:
            g = _circle_gap(x, y)
            return np.sqrt(np.sum(g * g, axis=-1))
        fx = suspension_embedding(x, self.roof)
        fy = suspension_embedding(y, self.roof)
        return np.sqrt(np.sum((fx - fy) ** 2, axis=-1))

    def random_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random((n, self.dim))
        if self.kind is SpaceKind.INTERVAL:
            return self.low + (self.high - self.low) * u
        if self.kind is SpaceKind.SUSPENSION:
            u[:, 1] *= self.roof
        return u

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is SpaceKind.INTERVAL:
            d.update(low=self.low, high=self.high)
        if self.kind is SpaceKind.SUSPENSION:
            d["roof"] = self.roof
        return d


def distance(space: Space, x, y):
    """Distance between ``x`` and ``y``; broadcasts over leading axes."""
    return space.distance(x, y)


def _suspension_lipschitz(roof: float) -> tuple[float, float]:
    lip_u = float(np.sqrt(5.0))
    lip_h = float(np.sqrt(1.0 + 1.0 / (np.pi * roof) ** 2 + 1.0 / (2.0 * roof) ** 2))
    return lip_u, lip_h


@dataclass(frozen=True)
class CandidateGrid:
    """Finite ordered stand-in for the whole space."""

    space: Space
    points: np.ndarray = field(repr=False)
    mesh: float

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != self.space.dim:
            raise InvalidInputError("grid points must have shape (n, dim)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def nearest_distance(self, x) -> np.ndarray:
        """Distance from each row of ``x`` to its closest grid point."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(len(x))
        for lo in range(0, len(x), 512):
            chunk = x[lo : lo + 512]
            d = self.space.distance(chunk[:, None, :], self.points[None, :, :])
            out[lo : lo + 512] = d.min(axis=1)
        return out


def regular_grid(space: Space, n_per_dim: int) -> CandidateGrid:
    """Equispaced grid in lexicographic chart order, with an upper bound on its mesh."""
    n = int(n_per_dim)
    if n < 2:
        raise InvalidInputError("n_per_dim must be >= 2")
    kind = space.kind
    if kind is SpaceKind.CIRCLE:
        pts = (np.arange(n) / n)[:, None]
        mesh = 1.0 / (2 * n)
    elif kind is SpaceKind.INTERVAL:
        pts = np.linspace(space.low, space.high, n)[:, None]
        mesh = (space.high - space.low) / (2 * (n - 1))
    elif kind is SpaceKind.TORUS2:
        a = np.arange(n) / n
        uu, vv = np.meshgrid(a, a, indexing="ij")
        pts = np.column_stack([uu.ravel(), vv.ravel()])
        mesh = float(np.sqrt(2.0) / (2 * n))
    else:
        a = np.arange(n) / n
        hh = np.arange(n) * (space.roof / n)
        uu, vv = np.meshgrid(a, hh, indexing="ij")
        pts = np.column_stack([uu.ravel(), vv.ravel()])
        lip_u, lip_h = _suspension_lipschitz(space.roof)
        # the top height cell may need a full step to its nearest node
        mesh = lip_u / (2 * n) + lip_h * space.roof / n
    return CandidateGrid(space, pts, float(mesh))


def section_grid(space: Space, n: int) -> CandidateGrid:
    """Grid on the floor ``h = 0`` of a suspension (the cross-section every orbit meets).

    Only suitable for separated-set estimators: its mesh over the whole space
    is large.  For one-dimensional spaces this is the regular grid.
    """
    if space.kind is not SpaceKind.SUSPENSION:
        return regular_grid(space, n)
    n = int(n)
    if n < 2:
        raise InvalidInputError("n must be >= 2")
    pts = np.column_stack([np.arange(n) / n, np.zeros(n)])
    lip_u, lip_h = _suspension_lipschitz(space.roof)
    mesh = lip_u / (2 * n) + lip_h * space.roof / 2
    return CandidateGrid(space, pts, float(mesh))
