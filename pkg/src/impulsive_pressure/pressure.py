"""Partition functions and pressure estimates over finite candidate grids.

The six estimator kinds pair a stage metric (the plain distance, ``d_hat`` or
``d_bar``) with either separated sets (``*_s``, a supremum) or spanning sets
(``*_r``, an infimum).

All kinds share one orbit bank: every grid point is followed by the
impulsive semiflow and sampled on a common fine time step
``Delta = min(delta_list) / m``.  Shift grids for different ``delta`` are
then nested and every distance is read from the same samples, so the
orderings ``d_bar <= d_hat <= d`` hold exactly between the kinds.

For each (kind, delta) a pair cache stores the running maximum of the stage
metric at every ``T`` of the schedule, so one kernel pass serves the whole
(T, eps) lattice.

Partition functions are evaluated over a pool of candidate sets: the greedy
outputs of every kind and cell.  A separated-kind value is the largest sum over
pool sets that are separated for that kind and cell; a spanning-kind value is
the smallest over pool sets that span the grid.  The greedy set of the cell is
always in the pool, and the pool makes the finite-resolution forms of the
monotonicity and comparison inequalities exact.
"""
from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .dynmetrics import MetricKind, PseudoMetricParams
from .errors import InvalidInputError, UnsupportedSystemError
from .flows import Semiflow
from .geometry import CandidateGrid
from .impulsive import ImpulsiveSystem, TrajectoryRecord, impulsive_trajectory
from .potentials import Constant, FourierCircle, Potential, Tabulated

_STAGE = {MetricKind.CLASSICAL: kernels.STAGE_CLASSICAL, MetricKind.HAT: kernels.STAGE_HAT,
          MetricKind.BAR: kernels.STAGE_BAR}
MONOTONE_TOL = 1e-9


class EstimatorKind(str, enum.Enum):
    CLASSICAL_R = "classical_r"
    CLASSICAL_S = "classical_s"
    BAR_R = "bar_r"
    BAR_S = "bar_s"
    HAT_R = "hat_r"
    HAT_S = "hat_s"

    @property
    def metric(self) -> MetricKind:
        return MetricKind(self.value.split("_")[0])

    @property
    def spanning(self) -> bool:
        return self.value.endswith("_r")


ALL_KINDS = tuple(EstimatorKind)


def as_system(system) -> ImpulsiveSystem:
    if isinstance(system, ImpulsiveSystem):
        return system
    if isinstance(system, Semiflow):
        return ImpulsiveSystem(system)
    raise InvalidInputError("expected a Semiflow or an ImpulsiveSystem")


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------

def _strict(values, increasing, name):
    v = [float(x) for x in values]
    if not v:
        raise InvalidInputError(f"{name} must not be empty")
    if any(not (x > 0 and math.isfinite(x)) for x in v):
        raise InvalidInputError(f"{name} entries must be positive and finite")
    pairs = zip(v, v[1:])
    if increasing and not all(a < b for a, b in pairs):
        raise InvalidInputError(f"{name} must be strictly increasing")
    if not increasing and not all(a > b for a, b in pairs):
        raise InvalidInputError(f"{name} must be strictly decreasing")
    return tuple(v)


def _multiple(x: float, step: float, what: str) -> int:
    q = x / step
    k = round(q)
    if abs(q - k) > 1e-9 * max(1.0, q):
        raise InvalidInputError(f"{what}={x} is not a multiple of the fine time step {step}")
    return int(k)


@dataclass(frozen=True, eq=False)
class Schedule:
    """The (T, eps, delta) lattice, the candidate grid and the discretisation parameters.

    ``m`` is the number of shift samples for the smallest ``delta``; larger
    ``delta`` get proportionally more so that their shift grids nest.
    """

    T_list: tuple
    eps_list: tuple
    delta_list: tuple
    grid: CandidateGrid
    m: int = 32
    dt: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "T_list", _strict(self.T_list, True, "T_list"))
        object.__setattr__(self, "eps_list", _strict(self.eps_list, False, "eps_list"))
        object.__setattr__(self, "delta_list", _strict(self.delta_list, False, "delta_list"))
        if int(self.m) != self.m or self.m < 2:
            raise InvalidInputError("m must be an integer >= 2")
        if self.dt is None:
            object.__setattr__(self, "dt", min(min(self.delta_list) / 8, 0.01))
        if not self.dt > 0:
            raise InvalidInputError("dt must be positive")
        for d in self.delta_list:
            _multiple(d, self.fine_step(True), "delta")
        for T in self.T_list:
            _multiple(T, self.fine_step(True), "T")
            _multiple(T, self.fine_step(False), "T")

    def fine_step(self, shifts: bool = True) -> float:
        """Common sample spacing; without shift metrics only the t-grid is needed."""
        return min(self.delta_list) / (self.m if shifts else 4)

    def m_for(self, delta: float, shifts: bool = True) -> int:
        return _multiple(delta, self.fine_step(shifts), "delta")

    def t_ratio(self, delta: float, shifts: bool = True) -> int:
        return max(1, round(self.m_for(delta, shifts) / 4))

    def params(self, delta: float) -> PseudoMetricParams:
        m = self.m_for(delta)
        return PseudoMetricParams(delta, m, self.t_ratio(delta) * self.fine_step())

    def check_mesh(self) -> None:
        if self.grid.mesh > min(self.eps_list) / 4 * (1 + 1e-12):
            raise InvalidInputError(
                f"grid mesh {self.grid.mesh:.4g} exceeds min(eps)/4 = {min(self.eps_list) / 4:.4g}; "
                "spanning estimates need a finer grid"
            )

    def to_dict(self) -> dict:
        return {"T_list": list(self.T_list), "eps_list": list(self.eps_list),
                "delta_list": list(self.delta_list), "grid_points": len(self.grid),
                "grid_mesh": self.grid.mesh, "m": self.m, "dt": self.dt}


# ---------------------------------------------------------------------------
# Birkhoff integrals
# ---------------------------------------------------------------------------

def _cumulative_integrals(sys: ImpulsiveSystem, f: Potential, rec: TrajectoryRecord,
                          checkpoints, dt: float) -> np.ndarray:
    """``int_0^T f(psi_s x) ds`` at each checkpoint ``T``, segment by segment.

    Composite trapezoid with sub-steps at most ``dt``; sub-intervals end at
    impulse times and at checkpoints, never straddling either.
    """
    checkpoints = np.asarray(checkpoints, dtype=float)
    if isinstance(f, Constant):
        return float(f.c) * checkpoints
    space = sys.space
    out = np.empty(len(checkpoints))
    total = 0.0
    c = 0
    Tmax = float(checkpoints.max())
    for start, point, dur in zip(rec.starts, rec.points, rec.durations):
        end = min(start + dur, Tmax)
        if end <= start:
            if start >= Tmax:
                break
            continue
        cuts = [start] + [float(t) for t in checkpoints[c:] if start < t < end] + [end]
        nodes, marks = [], []
        for a, b in zip(cuts, cuts[1:]):
            n = max(1, math.ceil((b - a) / dt - 1e-9))
            marks.append(len(nodes))
            nodes.extend(np.linspace(a, b, n + 1) - start)
        nodes = np.asarray(nodes)
        vals = f(space, rec.flow.orbit(point, np.maximum(nodes, 0.0)))
        for k, (a, b) in enumerate(zip(cuts, cuts[1:])):
            lo = marks[k]
            hi = marks[k + 1] if k + 1 < len(marks) else len(nodes)
            total += float(np.trapezoid(vals[lo:hi], nodes[lo:hi]))
            while c < len(checkpoints) and checkpoints[c] <= b:
                out[c] = total
                c += 1
    while c < len(checkpoints):
        out[c] = total
        c += 1
    return out


def birkhoff_integral(sys, f: Potential, x, T: float, dt: float) -> float:
    """``int_0^T f(psi_s x) ds`` by per-segment composite trapezoid."""
    if not T > 0 or not dt > 0:
        raise InvalidInputError("need T > 0 and dt > 0")
    sys = as_system(sys)
    rec = impulsive_trajectory(sys, x, T)
    return float(_cumulative_integrals(sys, f, rec, [T], dt)[0])


def partition_function(integrals) -> float:
    """``log sum exp`` of Birkhoff integrals of a nonempty set."""
    v = np.asarray(integrals, dtype=float)
    if v.size == 0:
        raise InvalidInputError("partition function of an empty set")
    return float(logsumexp(v))


def log_partition(sys, f: Potential, points, T: float, dt: float) -> float:
    """``log Z`` of an explicit point set."""
    sys = as_system(sys)
    return partition_function([birkhoff_integral(sys, f, p, T, dt) for p in np.atleast_2d(points)])


# ---------------------------------------------------------------------------
# orbit bank and pair caches
# ---------------------------------------------------------------------------

class OrbitBank:
    """Fine-step samples of every grid orbit, in the kernels' metric coordinates."""

    def __init__(self, sys: ImpulsiveSystem, grid: CandidateGrid, step: float, n_samples: int,
                 horizon: float):
        self.sys = sys
        self.step = step
        space = sys.space
        ts = np.arange(n_samples) * step
        self.records = []
        first = space.metric_coords(grid.points[:1])
        self.data = np.empty((len(grid), n_samples, first.shape[-1]))
        for i, p in enumerate(grid.points):
            rec = impulsive_trajectory(sys, p, max(horizon, float(ts[-1])))
            self.records.append(rec)
            self.data[i] = space.metric_coords(rec.state_at(ts))
        self.code = space.metric_code


class PairCache:
    """Running maxima of one stage metric for all grid pairs, at every T checkpoint.

    Missing entries are NaN; entries are filled symmetrically on demand.
    Values at or above ``cap`` are only guaranteed to be ``>= cap``.
    """

    def __init__(self, bank: OrbitBank, metric: MetricKind, m: int, starts: np.ndarray,
                 checkpoints: np.ndarray, cap: float, threads: int = 1):
        n = bank.data.shape[0]
        self.bank = bank
        self.stage = _STAGE[metric]
        self.m = m if metric is not MetricKind.CLASSICAL else 1
        self.starts = np.ascontiguousarray(starts, dtype=np.intp)
        self.checkpoints = np.ascontiguousarray(checkpoints, dtype=np.intp)
        self.cap = float(cap)
        self.threads = max(1, int(threads))
        self.values = np.full((n, n, len(checkpoints)), np.nan)
        idx = np.arange(n)
        self.values[idx, idx] = 0.0
        self.full = False

    def _compute(self, i: int, js: np.ndarray) -> np.ndarray:
        out = np.empty((len(js), len(self.checkpoints)))
        kernels.stage_profiles(self.bank.data, i, np.ascontiguousarray(js, dtype=np.intp),
                               self.bank.code, self.stage, self.m, self.starts, self.checkpoints,
                               self.cap, out)
        return out

    def rows(self, i: int, js) -> np.ndarray:
        js = np.asarray(js, dtype=np.intp)
        vals = self.values[i, js]
        missing = np.isnan(vals[:, 0])
        if missing.any():
            mj = js[missing]
            got = self._compute(i, mj)
            self.values[i, mj] = got
            self.values[mj, i] = got
            vals[missing] = got
        return vals

    def fill_all(self) -> None:
        if self.full:
            return
        n = self.values.shape[0]

        def work(i):
            js = np.flatnonzero(np.isnan(self.values[i, :, 0]))
            js = js[js > i]
            return i, js, (self._compute(i, js) if len(js) else None)

        order = range(n)
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as ex:
                results = ex.map(work, order)
                for i, js, got in results:
                    if got is not None:
                        self.values[i, js] = got
                        self.values[js, i] = got
        else:
            for i in order:
                _, js, got = work(i)
                if got is not None:
                    self.values[i, js] = got
                    self.values[js, i] = got
        self.full = True


# ---------------------------------------------------------------------------
# greedy sets
# ---------------------------------------------------------------------------

def _greedy_separated(cache: PairCache, c: int, eps: float, chunk: int = 256) -> tuple:
    n = cache.values.shape[0]
    acc: list[int] = []
    for i in range(n):
        ok = True
        # recent acceptances are the likeliest to be close in grid order
        for hi in range(len(acc), 0, -chunk):
            js = acc[max(0, hi - chunk):hi]
            if np.any(cache.rows(i, js)[:, c] < eps):
                ok = False
                break
        if ok:
            acc.append(i)
    return tuple(acc)


def _greedy_spanning(cache: PairCache, c: int, eps: float) -> tuple:
    cache.fill_all()
    cover = cache.values[:, :, c] < eps
    uncovered = np.ones(cover.shape[0], dtype=bool)
    chosen = []
    while uncovered.any():
        gain = cover[:, uncovered].sum(axis=1)
        k = int(np.argmax(gain))
        if gain[k] == 0:  # pragma: no cover - every point covers itself
            raise AssertionError("greedy cover stalled")
        chosen.append(k)
        uncovered &= ~cover[k]
    return tuple(sorted(chosen))


def _is_separated(cache: PairCache, members, c: int, eps: float) -> bool:
    members = list(members)
    for a, i in enumerate(members[:-1]):
        if np.any(cache.rows(i, members[a + 1:])[:, c] < eps):
            return False
    return True


def _is_spanning(cache: PairCache, members, c: int, eps: float) -> bool:
    cache.fill_all()
    return bool(np.all((cache.values[list(members), :, c] < eps).any(axis=0)))


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

@dataclass
class Row:
    kind: str
    T: float
    eps: float
    delta: float
    logZ: float
    set_size: int
    seconds: float = 0.0


@dataclass
class Fit:
    kind: str
    eps: float
    delta: float
    slope: float
    residual: float


CSV_COLUMNS = ("kind", "T", "eps", "delta", "logZ", "set_size", "seconds")


def fit_slope(Ts, logZ) -> tuple[float, float]:
    """Least-squares slope of ``logZ`` against ``T`` over the largest half of the T values."""
    Ts = np.asarray(Ts, dtype=float)
    logZ = np.asarray(logZ, dtype=float)
    order = np.argsort(Ts)
    k = max(2, math.ceil(len(Ts) / 2)) if len(Ts) >= 2 else 1
    Ts, logZ = Ts[order][-k:], logZ[order][-k:]
    if len(Ts) < 2:
        return float(logZ[0] / Ts[0]), 0.0
    A = np.column_stack([Ts, np.ones_like(Ts)])
    coef, *_ = np.linalg.lstsq(A, logZ, rcond=None)
    resid = logZ - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


@dataclass
class PressureTable:
    rows: list[Row]
    fits: list[Fit] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def kinds(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.kind not in seen:
                seen.append(r.kind)
        return seen

    def value(self, kind, T, eps, delta) -> Row:
        kind = EstimatorKind(kind).value
        for r in self.rows:
            if r.kind == kind and r.T == T and r.eps == eps and r.delta == delta:
                return r
        raise KeyError((kind, T, eps, delta))

    def refit(self) -> None:
        groups: dict = {}
        for r in self.rows:
            groups.setdefault((r.kind, r.eps, r.delta), []).append(r)
        self.fits = []
        for (kind, eps, delta), rows in groups.items():
            slope, res = fit_slope([r.T for r in rows], [r.logZ for r in rows])
            self.fits.append(Fit(kind, eps, delta, slope, res))

    def fit(self, kind, eps, delta) -> Fit:
        kind = EstimatorKind(kind).value
        for f in self.fits:
            if f.kind == kind and f.eps == eps and f.delta == delta:
                return f
        raise KeyError((kind, eps, delta))

    def headline(self, kind) -> Fit:
        """Fit at the smallest eps and smallest delta."""
        kind = EstimatorKind(kind).value
        cand = [f for f in self.fits if f.kind == kind]
        if not cand:
            raise KeyError(kind)
        e = min(f.eps for f in cand)
        d = min(f.delta for f in cand)
        return self.fit(kind, e, d)

    def check_monotonicity(self) -> list[str]:
        """Warnings for logZ that grows with eps or (for shift kinds) with delta."""
        out = []
        by = {(r.kind, r.T, r.eps, r.delta): r.logZ for r in self.rows}
        for (kind, T, eps, delta), v in sorted(by.items()):
            for (k2, T2, e2, d2), w in sorted(by.items()):
                if (k2, T2) != (kind, T):
                    continue
                if d2 == delta and e2 > eps and w > v + MONOTONE_TOL:
                    out.append(f"{kind}: logZ not monotone in eps at T={T!r}, delta={delta!r}: "
                               f"eps={eps!r} -> {v!r}, eps={e2!r} -> {w!r}")
                if (e2 == eps and d2 > delta and w > v + MONOTONE_TOL
                        and EstimatorKind(kind).metric is not MetricKind.CLASSICAL):
                    out.append(f"{kind}: logZ not monotone in delta at T={T!r}, eps={eps!r}: "
                               f"delta={delta!r} -> {v!r}, delta={d2!r} -> {w!r}")
        return out

    # -- serialisation ---------------------------------------------------
    def to_csv(self, path=None, header: dict | None = None) -> str:
        lines = []
        for k, v in (header or {}).items():
            lines.append(f"# {k}: {v}")
        lines.append(",".join(CSV_COLUMNS))
        for r in self.rows:
            lines.append(",".join([r.kind, repr(float(r.T)), repr(float(r.eps)), repr(float(r.delta)),
                                   repr(float(r.logZ)), str(int(r.set_size)), repr(float(r.seconds))]))
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path) -> "PressureTable":
        rows = []
        with open(path, encoding="utf-8") as fh:
            body = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
        if not body or tuple(body[0].split(",")) != CSV_COLUMNS:
            raise InvalidInputError(f"{path}: not a pressure table (expected header {','.join(CSV_COLUMNS)})")
        for n, ln in enumerate(body[1:], start=2):
            parts = ln.split(",")
            if len(parts) != len(CSV_COLUMNS):
                raise InvalidInputError(f"{path}: malformed row {n}")
            try:
                rows.append(Row(parts[0], float(parts[1]), float(parts[2]), float(parts[3]),
                                float(parts[4]), int(parts[5]), float(parts[6])))
            except ValueError as exc:
                raise InvalidInputError(f"{path}: malformed row {n}: {exc}") from None
        t = cls(rows)
        t.refit()
        return t

    def summary(self) -> dict:
        kinds = []
        for k in self.kinds():
            h = self.headline(k)
            kinds.append({"kind": k, "slope": h.slope, "residual": h.residual,
                          "eps": h.eps, "delta": h.delta})
        return {"kinds": kinds, "warnings": list(self.warnings)}


# ---------------------------------------------------------------------------
# estimator
# ---------------------------------------------------------------------------

class PressureEstimator:
    """Builds the orbit bank, pair caches and greedy sets once; tables for any potential.

    Set construction does not depend on the potential, so several potentials
    can be evaluated on the same pools.
    """

    def __init__(self, system, schedule: Schedule, kinds=ALL_KINDS, threads: int = 1,
                 timing: bool = False):
        self.sys = as_system(system)
        self.schedule = schedule
        self.kinds = [EstimatorKind(k) for k in kinds]
        if not self.kinds:
            raise InvalidInputError("no estimator kinds requested")
        if any(k.spanning for k in self.kinds):
            schedule.check_mesh()
        self.threads = threads
        self.timing = timing
        self.shifts = any(k.metric is not MetricKind.CLASSICAL for k in self.kinds)
        self._caches: dict = {}
        self._sets: dict = {}
        self._times: dict = {}
        self._built = False

    # -- construction ----------------------------------------------------
    def _build_bank(self):
        s = self.schedule
        step = s.fine_step(self.shifts)
        n_T = _multiple(s.T_list[-1], step, "T")
        m_max = max(s.m_for(d, self.shifts) for d in s.delta_list) if self.shifts else 1
        n_samples = n_T + m_max
        self.step = step
        self.bank = OrbitBank(self.sys, s.grid, step, n_samples, n_T * step)
        self.T_index = [_multiple(T, step, "T") for T in s.T_list]

    def windows(self, delta: float):
        s = self.schedule
        r = s.t_ratio(delta, self.shifts)
        n_T = self.T_index[-1]
        starts = np.union1d(np.arange(0, n_T + 1, r), self.T_index).astype(np.intp)
        checkpoints = np.searchsorted(starts, self.T_index, side="right").astype(np.intp)
        return starts, checkpoints

    def cache(self, metric: MetricKind, delta: float) -> PairCache:
        key = (metric, delta)
        if key not in self._caches:
            starts, cps = self.windows(delta)
            m = self.schedule.m_for(delta, self.shifts)
            self._caches[key] = PairCache(self.bank, metric, m, starts, cps,
                                          max(self.schedule.eps_list), self.threads)
        return self._caches[key]

    def build(self):
        if self._built:
            return
        self._build_bank()
        s = self.schedule
        for kind in self.kinds:
            for delta in s.delta_list:
                cache = self.cache(kind.metric, delta)
                for c, T in enumerate(s.T_list):
                    for eps in s.eps_list:
                        t0 = time.perf_counter()
                        key = (kind, T, eps, delta)
                        if kind.spanning:
                            self._sets[key] = _greedy_spanning(cache, c, eps)
                            # the maximal separated set of the same metric spans as well
                            self._sets[(kind, T, eps, delta, "sep")] = _greedy_separated(cache, c, eps)
                        else:
                            self._sets[key] = _greedy_separated(cache, c, eps)
                        self._times[key] = time.perf_counter() - t0
        self.pool = sorted(set(self._sets.values()), key=lambda m: (len(m), m))
        self._verified: dict = {}
        self._built = True

    def greedy_set(self, kind, T, eps, delta) -> np.ndarray:
        self.build()
        return self.schedule.grid.points[list(self._sets[(EstimatorKind(kind), T, eps, delta)])]

    def valid_sets(self, kind: EstimatorKind, c: int, eps: float, delta: float) -> list:
        key = (kind, c, eps, delta)
        if key not in self._verified:
            cache = self.cache(kind.metric, delta)
            test = _is_spanning if kind.spanning else _is_separated
            self._verified[key] = [m for m in self.pool if test(cache, m, c, eps)]
        return self._verified[key]

    def integrals(self, f: Potential) -> np.ndarray:
        """Birkhoff integrals of every grid orbit at every T (shape ``(n, len(T_list))``)."""
        self.build()
        return np.array([_cumulative_integrals(self.sys, f, rec, self.schedule.T_list, self.schedule.dt)
                         for rec in self.bank.records])

    # -- evaluation ------------------------------------------------------
    def table(self, f: Potential | None = None) -> PressureTable:
        f = f if f is not None else Constant(0.0)
        self.build()
        B = self.integrals(f)
        s = self.schedule
        rows = []
        for kind in self.kinds:
            for delta in s.delta_list:
                for c, T in enumerate(s.T_list):
                    for eps in s.eps_list:
                        t0 = time.perf_counter()
                        sets = self.valid_sets(kind, c, eps, delta)
                        vals = [partition_function(B[list(m), c]) for m in sets]
                        k = int(np.argmin(vals) if kind.spanning else np.argmax(vals))
                        secs = 0.0
                        if self.timing:
                            secs = self._times[(kind, T, eps, delta)] + time.perf_counter() - t0
                        rows.append(Row(kind.value, T, eps, delta, vals[k], len(sets[k]), secs))
        table = PressureTable(rows, metadata={"backend": kernels.BACKEND, **s.to_dict()})
        table.refit()
        table.warnings = table.check_monotonicity()
        return table


def estimate_pressure(system, f: Potential, kind, schedule: Schedule, threads: int = 1,
                      timing: bool = False) -> PressureTable:
    """Fill the (T, eps, delta) lattice for one kind or a list of kinds."""
    kinds = [kind] if isinstance(kind, (str, EstimatorKind)) else list(kind)
    return PressureEstimator(system, schedule, kinds, threads, timing).table(f)


def _single_cell(sys, kind, grid, T, eps, delta, m):
    schedule = Schedule((T,), (eps,), (delta,), grid, m=m)
    return PressureEstimator(sys, schedule, [kind])


def build_separated(sys, kind, grid: CandidateGrid, T: float, eps: float, delta: float,
                    m: int = 32) -> np.ndarray:
    """Greedy maximal separated subset of the grid, swept in grid order."""
    kind = EstimatorKind(kind)
    sep = EstimatorKind(kind.metric.value + "_s")
    return _single_cell(sys, sep, grid, T, eps, delta, m).greedy_set(sep, T, eps, delta)


def build_spanning(sys, kind, grid: CandidateGrid, T: float, eps: float, delta: float,
                   m: int = 32) -> np.ndarray:
    """Greedy cover of the grid by dynamical ``eps``-balls."""
    kind = EstimatorKind(kind)
    span = EstimatorKind(kind.metric.value + "_r")
    schedule = Schedule((T,), (eps,), (delta,), grid, m=m)
    est = PressureEstimator(sys, schedule, [span])
    return est.greedy_set(span, T, eps, delta)


# ---------------------------------------------------------------------------
# closed-form right-hand sides
# ---------------------------------------------------------------------------

def _integral(f: Potential, a: float, b: float) -> float:
    if isinstance(f, Constant):
        return float(f.c) * (b - a)
    if isinstance(f, FourierCircle):
        total = f.constant * (b - a)
        for k, ca, cb in f.terms:
            w = 2.0 * math.pi * k
            total += ca * (math.sin(w * b) - math.sin(w * a)) / w
            total += cb * (math.cos(w * a) - math.cos(w * b)) / w
        return float(total)
    if isinstance(f, Tabulated):
        nodes = np.concatenate([f.nodes - 1.0, f.nodes, f.nodes + 1.0])
        xs = np.unique(np.concatenate([[a, b], nodes[(nodes > a) & (nodes < b)]]))
        return float(np.trapezoid(f.of_angle(xs), xs))
    raise UnsupportedSystemError(f"no closed-form integral for {type(f).__name__}")


def variational_oracle(system_id: str, f: Potential) -> float:
    """``sup_mu (h_mu + int f dmu)`` for the shipped examples with known invariant measures."""
    if system_id == "rotation_circle":
        return _integral(f, 0.0, 1.0)
    if system_id == "impulsive_circle":
        return 2.0 * _integral(f, 0.0, 0.5)
    if system_id == "suspension_doubling":
        if isinstance(f, Constant):
            return math.log(2.0) + float(f.c)
        raise UnsupportedSystemError("suspension oracle is only known for constant potentials")
    raise UnsupportedSystemError(f"no variational oracle for system {system_id!r}")
