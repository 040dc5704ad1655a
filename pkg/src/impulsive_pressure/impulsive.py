"""Impulsive semiflows built from a base flow, a finite jump set and an impulse map.

Hitting times are found by a coarse scan at step ``event_tol`` followed by
bisection down to floating-point resolution.  A point counts as "on" a jump
point ``d`` when its chart displacement from ``d``, projected on the flow
direction at ``d``, changes sign from negative to non-negative while the
transversal residual stays within ``capture_radius``; on one-dimensional
spaces this is exact passage through ``d``.

Trajectories are right-continuous: at an impulse time the state is already
the image ``I(d)``.
"""
from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, InvalidInputError, SpacingViolationError
from .flows import Semiflow
from .geometry import Space

MEMBER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class JumpSet:
    points: np.ndarray
    capture_radius: float

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float)).copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if not self.capture_radius > 0:
            raise InvalidInputError("capture_radius must be positive")

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class ImpulseMap:
    """Images ``I(d_j)`` listed in the order of the jump set."""

    images: np.ndarray

    def __post_init__(self):
        img = np.atleast_2d(np.asarray(self.images, dtype=float)).copy()
        img.setflags(write=False)
        object.__setattr__(self, "images", img)

    def __call__(self, j: int) -> np.ndarray:
        return self.images[j]


class Region(str, enum.Enum):
    IN_D = "InD"
    IN_D_XI = "InDxi"
    IN_X_XI = "InXxi"


@dataclass(frozen=True, eq=False)
class ImpulsiveSystem:
    """``(X, phi, D, I)`` plus the tube width ``xi`` and the scan step ``event_tol``.

    ``jumps=None`` gives the plain flow, which the estimators treat as an
    impulsive system without impulses.
    """

    flow: Semiflow
    jumps: JumpSet | None = None
    impulse: ImpulseMap | None = None
    xi: float = 0.1
    event_tol: float = 0.025
    name: str = "custom"
    _hit_memo: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if (self.jumps is None) != (self.impulse is None):
            raise InvalidInputError("jump set and impulse map must be given together")
        if not self.xi > 0 or not self.event_tol > 0:
            raise InvalidInputError("xi and event_tol must be positive")
        if self.jumps is not None:
            if self.jumps.points.shape != self.impulse.images.shape:
                raise InvalidInputError("impulse map must have one image per jump point")
            if self.jumps.points.shape[1] != self.space.dim:
                raise InvalidInputError("jump points do not match the space dimension")
            if self.event_tol > self.xi / 4 * (1 + 1e-12):
                raise InvalidInputError("event_tol must not exceed xi/4")

    @classmethod
    def build(cls, flow, jump_points=None, images=None, xi=0.1, event_tol=None,
              capture_radius=None, name="custom") -> "ImpulsiveSystem":
        """Convenience constructor normalising points into the chart."""
        if event_tol is None:
            event_tol = xi / 4
        if jump_points is None or len(jump_points) == 0:
            return cls(flow, None, None, xi=xi, event_tol=event_tol, name=name)
        sp = flow.space
        D = np.array([sp.point(p) for p in np.atleast_1d(np.asarray(jump_points, dtype=float)).reshape(len(jump_points), -1)])
        Ix = np.array([sp.point(p) for p in np.atleast_1d(np.asarray(images, dtype=float)).reshape(len(images), -1)])
        if capture_radius is None:
            allp = np.vstack([D, Ix])
            dd = sp.distance(allp[:, None, :], allp[None, :, :])
            off = dd[~np.eye(len(allp), dtype=bool)]
            off = off[off > 0]
            capture_radius = 0.25 * float(off.min()) if off.size else event_tol
        return cls(flow, JumpSet(D, capture_radius), ImpulseMap(Ix), xi=xi,
                   event_tol=event_tol, name=name)

    @property
    def space(self) -> Space:
        return self.flow.space

    @property
    def has_impulses(self) -> bool:
        return self.jumps is not None

    @property
    def eta_floor(self) -> float:
        return self.xi / 2

    def describe(self) -> dict:
        d = {"name": self.name, "space": self.space.to_dict(), "flow": self.flow.to_dict(),
             "xi": self.xi, "event_tol": self.event_tol}
        if self.has_impulses:
            d["jumps"] = [{"at": a.tolist(), "to": b.tolist()}
                          for a, b in zip(self.jumps.points, self.impulse.images)]
        return d


# ---------------------------------------------------------------------------
# hitting times
# ---------------------------------------------------------------------------

def _section_frames(flow: Semiflow, targets: np.ndarray):
    frames = []
    for d in targets:
        v = np.asarray(flow.velocity(d), dtype=float)
        speed = float(np.linalg.norm(v))
        frames.append((v / speed if speed > 0 else v, speed))
    return frames


def _signed(space, states, d, unit):
    off = space.offset(states, d)
    g = off @ unit
    perp = np.linalg.norm(off - g[..., None] * unit, axis=-1)
    return g, perp


def _first_hit(flow: Semiflow, targets: np.ndarray, capture: float, step: float,
               x: np.ndarray, t_max: float):
    """Least ``t`` in ``(0, t_max]`` at which the flow of ``x`` passes a target.

    Returns ``(t, index)`` or ``None``.
    """
    if t_max <= 0 or len(targets) == 0:
        return None
    space = flow.space
    frames = _section_frames(flow, targets)
    n_total = math.ceil(t_max / step)
    chunk = n_total if not flow.closed_form else 512
    k0 = 0
    while k0 < n_total:
        k1 = min(k0 + chunk, n_total)
        ts = np.arange(k0, k1 + 1) * step
        ts[-1] = min(ts[-1], t_max)
        states = flow.orbit(x, ts)
        best = None
        for j, (unit, speed) in enumerate(frames):
            if speed == 0:
                continue
            g, perp = _signed(space, states, targets[j], unit)
            dt = np.diff(ts)
            cross = (g[:-1] < 0) & (g[1:] >= 0) & (np.diff(g) <= 2 * speed * dt + 1e-12) \
                & (perp[1:] <= capture)
            idx = np.flatnonzero(cross)
            if idx.size:
                i = int(idx[0])
                if best is None or i < best[0]:
                    best = (i, j)
        if best is not None:
            i, j = best
            lo, hi = float(ts[i]), float(ts[i + 1])
            unit = frames[j][0]
            while True:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                g, _ = _signed(space, flow.orbit(x, [mid]), targets[j], unit)
                if g[0] >= 0:
                    hi = mid
                else:
                    lo = mid
            return hi, j
        k0 = k1
    return None


def first_hitting_time(sys: ImpulsiveSystem, x, t_max: float) -> float | None:
    """``tau_1(x)`` if it is at most ``t_max``, else ``None``.  The infimum is over ``t > 0``."""
    if not t_max > 0:
        raise InvalidInputError("t_max must be positive")
    if not sys.has_impulses:
        return None
    hit = _first_hit(sys.flow, sys.jumps.points, sys.jumps.capture_radius, sys.event_tol,
                     sys.space.normalize(x), t_max)
    return None if hit is None else hit[0]


def _hit_from_image(sys: ImpulsiveSystem, j: int, horizon: float):
    """Memoised first hit from ``I(d_j)``; the image set is finite."""
    memo = sys._hit_memo.get(j)
    if memo is not None:
        hit, searched = memo
        if hit is not None or searched >= horizon:
            return hit if hit is None or hit[0] <= horizon else None
    hit = _first_hit(sys.flow, sys.jumps.points, sys.jumps.capture_radius, sys.event_tol,
                     sys.impulse.images[j], horizon)
    with sys._lock:
        sys._hit_memo[j] = (hit, horizon)
    return hit


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Piecewise flow orbit on ``[0, horizon]``.

    Segment ``k`` starts at ``starts[k]`` from ``points[k]`` and lasts
    ``durations[k]``; ``impulse_times[k]`` ends segment ``k`` at the jump point
    ``jump_points[k]`` and segment ``k + 1`` starts at its image.
    """

    flow: Semiflow
    x0: np.ndarray
    starts: np.ndarray
    points: np.ndarray
    durations: np.ndarray
    impulse_times: np.ndarray
    jump_indices: np.ndarray
    jump_points: np.ndarray
    horizon: float

    @property
    def segments(self) -> list[tuple[float, np.ndarray, float]]:
        return [(float(s), p, float(d)) for s, p, d in zip(self.starts, self.points, self.durations)]

    def segment_index(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.clip(np.searchsorted(self.starts, ts, side="right") - 1, 0, len(self.starts) - 1)

    def state_at(self, ts) -> np.ndarray:
        """Right-continuous states at the given times (array of shape ``(len(ts), dim)``)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        idx = self.segment_index(ts)
        out = np.empty((len(ts), self.points.shape[1]))
        for k in np.unique(idx):
            sel = idx == k
            local = np.maximum(ts[sel] - self.starts[k], 0.0)
            out[sel] = self.flow.orbit(self.points[k], local)
        return out

    def left_limit(self, n: int) -> np.ndarray:
        """State just before the ``n``-th impulse (0-based): the jump point that was hit."""
        return self.jump_points[n]


def impulsive_trajectory(sys: ImpulsiveSystem, x, T: float) -> TrajectoryRecord:
    """Follow the flow from ``x``, applying ``I`` at every visit to ``D`` up to time ``T``."""
    if not T > 0:
        raise InvalidInputError("horizon T must be positive")
    space = sys.space
    p = space.normalize(x)
    x0 = p.copy()
    starts, points, durs, imp, jidx = [], [], [], [], []
    t = 0.0
    max_jumps = math.ceil(T / sys.eta_floor) + 8
    hit = None
    if sys.has_impulses:
        hit = _first_hit(sys.flow, sys.jumps.points, sys.jumps.capture_radius, sys.event_tol, p, T)
    while True:
        starts.append(t)
        points.append(p)
        if hit is None or t + hit[0] > T:
            durs.append(T - t)
            break
        tau, j = hit
        durs.append(tau)
        t = t + tau
        imp.append(t)
        jidx.append(j)
        if len(imp) > max_jumps:
            raise SpacingViolationError(
                f"more than {max_jumps} impulses before T={T}: impulse spacing below "
                f"eta_floor={sys.eta_floor}; check D, I and xi"
            )
        p = sys.impulse.images[j]
        hit = _hit_from_image(sys, j, T - t)
    dim = space.dim
    jp = sys.jumps.points[np.asarray(jidx, dtype=int)] if jidx else np.empty((0, dim))
    return TrajectoryRecord(
        flow=sys.flow,
        x0=x0,
        starts=np.asarray(starts),
        points=np.asarray(points).reshape(-1, dim),
        durations=np.asarray(durs),
        impulse_times=np.asarray(imp),
        jump_indices=np.asarray(jidx, dtype=int),
        jump_points=jp,
        horizon=float(T),
    )


def psi(sys: ImpulsiveSystem, t: float, x) -> np.ndarray:
    """``psi_t(x)``, the impulsive semiflow."""
    if t < 0:
        raise InvalidInputError("negative time")
    x = sys.space.normalize(x)
    if t == 0:
        return x
    return impulsive_trajectory(sys, x, t).state_at([t])[0]


def psi_orbit(sys: ImpulsiveSystem, x, ts) -> np.ndarray:
    """``psi_t(x)`` for an array of times (one trajectory computation)."""
    ts = np.asarray(ts, dtype=float)
    T = float(ts.max()) if ts.size else 0.0
    x = sys.space.normalize(x)
    if T <= 0:
        return np.repeat(x[None, :], len(ts), axis=0)
    return impulsive_trajectory(sys, x, T).state_at(ts)


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

def _tube_time(sys: ImpulsiveSystem, x: np.ndarray):
    """``(s, j)`` with ``x = phi_s(d_j)``, ``0 < s < xi``, or ``None``."""
    flow, space = sys.flow, sys.space
    step = sys.event_tol / 2
    ts = np.arange(1, math.ceil(sys.xi / step)) * step
    ts = ts[ts < sys.xi]
    for j, d in enumerate(sys.jumps.points):
        if ts.size == 0:
            break
        states = flow.orbit(d, ts)
        dist = space.distance(states, x)
        k = int(np.argmin(dist))
        if dist[k] > 2 * step * (1.0 + float(np.linalg.norm(flow.velocity(d)))):
            continue
        lo, hi = max(ts[k] - step, 0.0), min(ts[k] + step, sys.xi)
        res = minimize_scalar(lambda s: float(space.distance(flow.orbit(d, [s])[0], x)),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        s = float(res.x)
        if res.fun <= MEMBER_TOL and 0 < s < sys.xi - MEMBER_TOL:
            return s, j
    return None


def classify_region(sys: ImpulsiveSystem, x) -> Region:
    """Place ``x`` in ``D``, in the open tube ``D_xi``, or in ``X_xi``."""
    if not sys.has_impulses:
        return Region.IN_X_XI
    x = sys.space.normalize(x)
    if float(np.min(sys.space.distance(sys.jumps.points, x))) <= MEMBER_TOL:
        return Region.IN_D
    if _tube_time(sys, x) is not None:
        return Region.IN_D_XI
    return Region.IN_X_XI


def tau_star(sys: ImpulsiveSystem, x, t_max: float = 1e3) -> float:
    """``tau*_xi``: zero on ``D``, ``tau_1`` on ``X_xi`` (``inf`` if no hit before ``t_max``)."""
    region = classify_region(sys, x)
    if region is Region.IN_D:
        return 0.0
    if region is Region.IN_D_XI:
        raise DomainError("tau* is only defined on X_xi and D")
    t = first_hitting_time(sys, x, t_max)
    return math.inf if t is None else t


def push_to_x_xi(sys: ImpulsiveSystem, y) -> np.ndarray:
    """``psi_{t(y)}(y)`` with ``t(y) = inf{t >= 0 : psi_t(y) in X_xi}``.

    Moves points of ``D`` and of the tube ``D_xi`` forward to the tube exit;
    points already in ``X_xi`` are returned unchanged.
    """
    y = sys.space.normalize(y)
    region = classify_region(sys, y)
    if region is Region.IN_X_XI:
        return y
    s = 0.0 if region is Region.IN_D else _tube_time(sys, y)[0]
    return psi(sys, sys.xi - s, y)


# ---------------------------------------------------------------------------
# standing conditions
# ---------------------------------------------------------------------------

@dataclass
class ConditionResult:
    name: str
    status: str  # "pass", "warn" or "fail"
    detail: str
    value: float | None = None


@dataclass
class ValidationReport:
    results: list[ConditionResult]
    eta: float | None = None
    modulus_table: list[tuple[float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def status(self, name: str) -> str:
        for r in self.results:
            if r.name == name:
                return r.status
        raise KeyError(name)

    def format(self) -> str:
        w = max(len(r.name) for r in self.results)
        return "\n".join(f"{r.name:<{w}}  {r.status:<4}  {r.detail}" for r in self.results)


def _half_tube(sys: ImpulsiveSystem, A: np.ndarray, label: str) -> list[ConditionResult]:
    flow, space, xi = sys.flow, sys.space, sys.xi
    out = []
    capture = sys.jumps.capture_radius
    returns = []
    for a in A:
        hit = _first_hit(flow, A, capture, sys.event_tol, a, xi)
        returns.append(math.inf if hit is None else hit[0])
    r = min(returns)
    ok = r >= xi * (1 - 1e-9)
    out.append(ConditionResult(f"tube-{label}-return", "pass" if ok else "fail",
                               f"earliest return to {label} after {r:.6g} (xi={xi})", r))
    ts = np.linspace(0.0, xi, 65)
    tubes = np.array([flow.orbit(a, ts) for a in A])
    if len(A) == 1:
        out.append(ConditionResult(f"tube-{label}-disjoint", "pass", "single point, vacuous"))
        out.append(ConditionResult(f"tube-{label}-constant", "pass", "single point, C=1", 1.0))
        return out
    gap = math.inf
    C = 0.0
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            dd = space.distance(tubes[i][1:, None, :], tubes[j][None, 1:, :])
            gap = min(gap, float(dd.min()))
            along = space.distance(tubes[i], tubes[j])
            # worst ratio d(phi_t)/d(phi_s) for t < s
            for k in range(1, len(ts)):
                if along[k] > 0:
                    C = max(C, float(along[:k].max() / along[k]))
                else:
                    C = math.inf
    out.append(ConditionResult(f"tube-{label}-disjoint", "pass" if gap > 0 else "fail",
                               f"min sampled distance between tubes {gap:.3g}", gap))
    out.append(ConditionResult(f"tube-{label}-constant", "pass" if math.isfinite(C) else "fail",
                               f"measured C={C:.6g}", C))
    return out


def _sample_region(sys, region, n, rng, max_tries=100):
    pts = []
    tries = 0
    while len(pts) < n and tries < max_tries * n:
        x = sys.space.random_points(1, rng)[0]
        tries += 1
        if classify_region(sys, x) is region:
            pts.append(x)
    return np.array(pts).reshape(-1, sys.space.dim)


def validate_conditions(sys: ImpulsiveSystem, samples: int, seed: int = 0,
                        horizon: float = 10.0) -> ValidationReport:
    """Exact checks of the impulse map and sampled diagnostics of the other standing conditions.

    Sampling can refute but never prove nonwandering, tube entry and continuity of tau*; those are
    ``warn`` unless a concrete counterexample turns up.
    """
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    res: list[ConditionResult] = []
    if not sys.has_impulses:
        res.append(ConditionResult("image-disjoint", "pass", "no jump set"))
        return ValidationReport(res)
    space = sys.space
    D, ID = sys.jumps.points, sys.impulse.images

    gap = float(space.distance(ID[:, None, :], D[None, :, :]).min())
    res.append(ConditionResult("image-disjoint", "pass" if gap > 0 else "fail",
                               f"min d(I(D), D) = {gap:.6g}", gap))
    if len(D) == 1:
        res.append(ConditionResult("image-lipschitz", "pass", "single jump point, vacuous", 0.0))
    else:
        dD = space.distance(D[:, None, :], D[None, :, :])
        dI = space.distance(ID[:, None, :], ID[None, :, :])
        off = ~np.eye(len(D), dtype=bool)
        lip = float(np.max(dI[off] / dD[off]))
        res.append(ConditionResult("image-lipschitz", "pass" if lip <= 1 + 1e-12 else "fail",
                                   f"Lip(I) = {lip:.6g}", lip))

    res.extend(_half_tube(sys, D, "D"))
    res.extend(_half_tube(sys, ID, "I(D)"))

    n_traj = min(samples, 50)
    starts = space.random_points(n_traj, rng)
    eta = math.inf
    c2_bad = 0
    for x in starts:
        rec = impulsive_trajectory(sys, x, horizon)
        if len(rec.impulse_times) > 1:
            eta = min(eta, float(np.diff(rec.impulse_times).min()))
        # late jumps land in recurrent territory: their images must avoid D
        for j in rec.jump_indices[len(rec.jump_indices) // 2:]:
            if float(space.distance(D, ID[j]).min()) <= MEMBER_TOL:
                c2_bad += 1
    if math.isfinite(eta):
        st = "pass" if eta >= sys.xi * (1 - 1e-9) else ("warn" if eta >= sys.eta_floor else "fail")
        res.append(ConditionResult("spacing", st, f"measured eta = {eta:.6g} (xi={sys.xi})", eta))
    else:
        res.append(ConditionResult("spacing", "pass", "fewer than two impulses per sampled orbit"))
    res.append(ConditionResult("nonwandering", "fail" if c2_bad else "warn",
                               f"sampled long-orbit recurrence, {c2_bad} image(s) in D"))

    # entering D_xi must be preceded by a visit to D
    c3_bad = 0
    for x in _sample_region(sys, Region.IN_X_XI, min(samples, 50), rng):
        ts = np.linspace(0, 2 * sys.xi, 41)[1:]
        states = sys.flow.orbit(x, ts)
        hit = first_hitting_time(sys, x, 2 * sys.xi)
        for t, s in zip(ts, states):
            if classify_region(sys, s) is Region.IN_D_XI and (hit is None or hit >= t):
                c3_bad += 1
                break
    res.append(ConditionResult("tube-entry", "fail" if c3_bad else "warn",
                               f"sampled tube entries without prior visit to D: {c3_bad}"))

    # modulus of continuity of tau* on X_xi u D
    pts = _sample_region(sys, Region.IN_X_XI, min(samples, 200), rng)
    pts = np.vstack([pts, D])
    tau = np.array([tau_star(sys, p, t_max=horizon) for p in pts])
    finite = np.isfinite(tau)
    pts, tau = pts[finite], tau[finite]
    dd = space.distance(pts[:, None, :], pts[None, :, :])
    dt = np.abs(tau[:, None] - tau[None, :])
    table = []
    for h in (0.1, 0.03, 0.01, 0.003):
        mask = (dd < h) & (dd > 0)
        table.append((h, float(dt[mask].max()) if mask.any() else 0.0))
    shrinking = all(b[1] <= a[1] + 1e-12 for a, b in zip(table, table[1:]))
    res.append(ConditionResult(
        "tau-continuity", "warn",
        "modulus of tau*: " + ", ".join(f"w({h:g})={w:.3g}" for h, w in table)
        + ("" if shrinking else "  (not shrinking: possible discontinuity)")))

    inv_bad = 0
    xs = _sample_region(sys, Region.IN_X_XI, samples, rng)
    ts = rng.random(len(xs)) * horizon
    for x, t in zip(xs, ts):
        if classify_region(sys, psi(sys, float(t), x)) is not Region.IN_X_XI:
            inv_bad += 1
    res.append(ConditionResult("forward-invariance", "fail" if inv_bad else "pass",
                               f"{inv_bad} of {len(xs)} sampled psi_t(X_xi) left X_xi", inv_bad))
    return ValidationReport(res, eta=None if not math.isfinite(eta) else eta, modulus_table=table)
