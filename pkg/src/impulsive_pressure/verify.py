"""Verification batteries run by ``impulsive-pressure verify``.

Each suite returns a list of :class:`Assertion` rows.  Without a config the
suites run their built-in batteries on the shipped systems; with a config
they run on the configured system, schedule and potential.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dynmetrics import EquivalenceSample, MetricKind, project_and_flow_quotient, quotient_distance, representative
from .errors import InvalidInputError
from .geometry import regular_grid
from .impulsive import Region, classify_region, impulsive_trajectory, psi, validate_conditions
from .potentials import Constant, FourierCircle, Potential, Tabulated, check_jump_compatible
from .pressure import EstimatorKind, PressureEstimator, Schedule, _is_spanning, variational_oracle
from .systems import SHIPPED_SYSTEMS, get_system

SHIFT_TOL = 1e-9
SHIFT_C = 0.7


@dataclass
class Assertion:
    name: str
    observed: float
    expected: str
    tolerance: str
    passed: bool

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: observed {self.observed:.6g}, expected {self.expected}, tol {self.tolerance}"


def _slopes(table, kinds):
    return {k: table.headline(k).slope for k in kinds}


def _spread(slopes: dict) -> float:
    v = list(slopes.values())
    return max(v) - min(v) if v else 0.0


def _shifted(f: Potential, c: float) -> Potential:
    if isinstance(f, Constant):
        return Constant(f.c + c)
    if isinstance(f, FourierCircle):
        return FourierCircle(f.terms, f.constant + c, f.jump_compatible)
    if isinstance(f, Tabulated):
        return Tabulated(f.nodes, f.values + c, f.periodic, f.jump_compatible)
    raise InvalidInputError(f"no constant shift for {type(f).__name__}")


# ---------------------------------------------------------------------------
# default schedules
# ---------------------------------------------------------------------------

def coincidence_schedule(sys) -> Schedule:
    return Schedule((10, 20, 40), (0.1, 0.05, 0.02), (0.2, 0.1), regular_grid(sys.space, 400))


def variational_schedule(sys) -> Schedule:
    return Schedule((20, 40, 80), (0.05, 0.02), (0.1, 0.05), regular_grid(sys.space, 800))


SMALL_SCHEDULES = {
    "rotation_circle": dict(T=(2, 4), eps=(0.2, 0.1), delta=(0.2, 0.1), n=40),
    "impulsive_circle": dict(T=(2, 4), eps=(0.2, 0.1), delta=(0.2, 0.1), n=40),
    "suspension_doubling": dict(T=(1, 2), eps=(0.5, 0.4), delta=(0.2, 0.1), n=23),
    "interval_translation": dict(T=(2, 4), eps=(0.2, 0.1), delta=(0.2, 0.1), n=41),
    "torus_rotation": dict(T=(1, 2), eps=(0.3, 0.2), delta=(0.2, 0.1), n=15),
    "ode_circle": dict(T=(2, 4), eps=(0.2, 0.1), delta=(0.2, 0.1), n=40),
}


def small_schedule(name: str, sys) -> Schedule:
    s = SMALL_SCHEDULES[name]
    return Schedule(s["T"], s["eps"], s["delta"], regular_grid(sys.space, s["n"]), m=16)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def continuous_coincidence(cfg=None, threads: int = 1) -> list[Assertion]:
    """All six kinds agree on a flow without impulses and match the closed form."""
    if cfg is None:
        runs = [("rotation_circle", get_system("rotation_circle"), None,
                 [Constant(0.0), FourierCircle.sine(jump_compatible=False)], list(EstimatorKind))]
    else:
        if cfg.system.has_impulses:
            raise InvalidInputError("continuous-coincidence needs a system without impulses")
        pots = [Constant(0.0)] + ([] if cfg.potential == Constant(0.0) else [cfg.potential])
        runs = [(cfg.system_id, cfg.system, cfg.schedule(), pots, cfg.kinds)]
    out = []
    for sid, sys, schedule, pots, kinds in runs:
        kinds = [EstimatorKind(k) for k in kinds]
        est = PressureEstimator(sys, schedule or coincidence_schedule(sys), kinds, threads)
        for f in pots:
            label = f"{sys.name} f={_label(f)}"
            table = est.table(f)
            slopes = _slopes(table, kinds)
            out.append(Assertion(f"{label}: pairwise spread of headline slopes", _spread(slopes),
                                 "0", "0.03", _spread(slopes) <= 0.03))
            out.extend(_headline_chain(label, table, kinds))
            if sid is not None:
                try:
                    ref = variational_oracle(sid, f)
                except KeyError:
                    continue
                for k, v in slopes.items():
                    out.append(Assertion(f"{label}: {k.value} headline vs closed form", v,
                                         f"{ref:.6g}", "0.05", abs(v - ref) <= 0.05))
    return out


CHAIN = ("classical_r", "bar_r", "bar_s", "classical_s")
CHAIN_FLOOR = 1e-12


def _headline_chain(label: str, table, kinds) -> list[Assertion]:
    """``P_r <= Pbar_r <= Pbar_s <= P_s`` on headline slopes, within twice the fit residuals."""
    present = {k.value for k in kinds}
    if not set(CHAIN) <= present:
        return []
    fits = [table.headline(k) for k in CHAIN]
    worst = 0.0
    ok = True
    for lo, hi in zip(fits, fits[1:]):
        excess = lo.slope - hi.slope
        tol = 2.0 * (lo.residual + hi.residual) + CHAIN_FLOOR
        worst = max(worst, excess)
        ok &= excess <= tol
    return [Assertion(f"{label}: headline chain {' <= '.join(CHAIN)}, largest excess", worst, "<= 0",
                      "2 x fit residual", ok)]


def _label(f: Potential) -> str:
    if isinstance(f, Constant):
        return f"const({f.c:g})"
    return type(f).__name__.lower()


def _inequality_checks(label: str, est: PressureEstimator, pots) -> list[Assertion]:
    out = []
    s = est.schedule
    kinds = est.kinds
    for f in pots:
        base = est.table(f)
        shifted = est.table(_shifted(f, SHIFT_C))
        worst = max(abs(b.logZ + SHIFT_C * b.T - r.logZ) for b, r in zip(base.rows, shifted.rows))
        out.append(Assertion(f"{label} f={_label(f)}: logZ(f+c) - logZ(f) - cT", worst, "0",
                             f"{SHIFT_TOL:g}", worst <= SHIFT_TOL))
        viol = 0
        checked = 0
        for metric in MetricKind:
            r, sp = EstimatorKind(metric.value + "_r"), EstimatorKind(metric.value + "_s")
            if r in kinds and sp in kinds:
                for T, e, d in itertools.product(s.T_list, s.eps_list, s.delta_list):
                    checked += 1
                    viol += base.value(r, T, e, d).logZ > base.value(sp, T, e, d).logZ
        out.append(Assertion(f"{label} f={_label(f)}: cells with logZ_r > logZ_s ({checked} checked)",
                             viol, "0", "exact", viol == 0))
        for lo, hi in (("bar_s", "hat_s"), ("hat_s", "classical_s"), ("bar_r", "hat_r"),
                       ("hat_r", "classical_r")):
            if EstimatorKind(lo) in kinds and EstimatorKind(hi) in kinds:
                viol = sum(base.value(lo, T, e, d).logZ > base.value(hi, T, e, d).logZ
                           for T, e, d in itertools.product(s.T_list, s.eps_list, s.delta_list))
                out.append(Assertion(f"{label} f={_label(f)}: cells with logZ[{lo}] > logZ[{hi}]",
                                     viol, "0", "exact", viol == 0))
        out.append(Assertion(f"{label} f={_label(f)}: monotonicity warnings", len(base.warnings),
                             "0", "exact", not base.warnings))
    # pairwise ordering of the stage metrics, read below the common cap
    for d in s.delta_list:
        caches = [est.cache(m, d) for m in (MetricKind.BAR, MetricKind.HAT, MetricKind.CLASSICAL)]
        for c in caches:
            c.fill_all()
        cap = caches[0].cap
        vals = [np.minimum(c.values, cap) for c in caches]
        bad = int(np.sum(vals[0] > vals[1]) + np.sum(vals[1] > vals[2]))
        out.append(Assertion(f"{label} delta={d:g}: pairs violating dbar <= dhat <= d", bad, "0",
                             "exact", bad == 0))
    # every maximal separated set spans at the same parameters
    bad = 0
    for kind in kinds:
        if kind.spanning:
            continue
        for (c, T), e, d in itertools.product(enumerate(s.T_list), s.eps_list, s.delta_list):
            members = est._sets[(kind, T, e, d)]
            bad += not _is_spanning(est.cache(kind.metric, d), members, c, e)
    out.append(Assertion(f"{label}: maximal separated sets failing to span", bad, "0", "exact", bad == 0))
    return out


def inequalities(cfg=None, threads: int = 1) -> list[Assertion]:
    """Constant-shift identity, Z_r <= Z_s, dbar <= dhat orderings and set duality, per cell."""
    out = []
    if cfg is None:
        for name in SHIPPED_SYSTEMS:
            sys = get_system(name)
            est = PressureEstimator(sys, small_schedule(name, sys), list(EstimatorKind), threads)
            pots = [Constant(0.0), FourierCircle.sine(jump_compatible=sys.has_impulses)]
            out.extend(_inequality_checks(name, est, pots))
    else:
        est = PressureEstimator(cfg.system, cfg.schedule(), cfg.kinds, threads)
        pots = [Constant(0.0)] + ([] if cfg.potential == Constant(0.0) else [cfg.potential])
        out.extend(_inequality_checks(cfg.system.name, est, pots))
    return out


VARIATIONAL_KINDS = ("bar_s", "bar_r", "hat_s", "hat_r")
VARIATIONAL_C = 0.3


def variational(cfg=None, threads: int = 1) -> list[Assertion]:
    """Headline slopes of the shift kinds against the closed-form variational value."""
    if cfg is None:
        sid, sys = "impulsive_circle", get_system("impulsive_circle")
        schedule, f, kinds = variational_schedule(sys), FourierCircle.sine(), list(VARIATIONAL_KINDS)
    else:
        sid, sys, schedule, f, kinds = cfg.system_id, cfg.system, cfg.schedule(), cfg.potential, cfg.kinds
        if sid is None:
            raise InvalidInputError("the variational suite needs a shipped system id")
    ref = variational_oracle(sid, f)
    kinds = [EstimatorKind(k) for k in kinds]
    out = []
    jc = check_jump_compatible(f, sys)
    out.append(Assertion(f"{sys.name}: f = f o I on D for f={_label(f)}", jc.worst, "0", "1e-12", jc.passed))
    est = PressureEstimator(sys, schedule, kinds, threads)
    slopes = _slopes(est.table(f), kinds)
    out.append(Assertion(f"{sys.name} f={_label(f)}: pairwise spread of headline slopes", _spread(slopes),
                         "0", "0.05", _spread(slopes) <= 0.05))
    for k, v in slopes.items():
        out.append(Assertion(f"{sys.name} f={_label(f)}: {k.value} headline vs variational value", v,
                             f"{ref:.6g}", "0.08", abs(v - ref) <= 0.08))
    c = Constant(VARIATIONAL_C)
    ref_c = variational_oracle(sid, c)
    for k, v in _slopes(est.table(c), kinds).items():
        out.append(Assertion(f"{sys.name} f={_label(c)}: {k.value} headline", v, f"{ref_c:.6g}", "0.03",
                             abs(v - ref_c) <= 0.03))
    return out


def quotient_distances(sample: EquivalenceSample, space, X, Y) -> np.ndarray:
    """Batched :func:`quotient_distance` for pairs ``(X[k], Y[k])``.

    All-pairs shortest paths inside the sample are computed once; a chain
    between two outside points enters and leaves the sample at most once each.
    """
    P = sample.base_points
    W = space.distance(P[:, None, :], P[None, :, :])
    for a, b in sample.relation_pairs:
        W[a, b] = 0.0
    for k in range(len(P)):
        np.minimum(W, W[:, k:k + 1] + W[k:k + 1, :], out=W)
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    dx = space.distance(X[:, None, :], P[None, :, :])
    dy = space.distance(Y[:, None, :], P[None, :, :])
    via = np.min(dx[:, :, None] + W[None, :, :] + dy[:, None, :], axis=(1, 2))
    return np.minimum(space.distance(X, Y), via)


def quotient(cfg=None, threads: int = 1, seed: int = 0) -> list[Assertion]:
    sys = get_system("impulsive_circle") if cfg is None else cfg.system
    if not sys.has_impulses:
        raise InvalidInputError("the quotient suite needs a system with impulses")
    space = sys.space
    rng = np.random.default_rng(seed)
    sample = EquivalenceSample.from_system(sys, regular_grid(space, 100).points)
    out = []
    X, Y = space.random_points(10_000, rng), space.random_points(10_000, rng)
    q = quotient_distances(sample, space, X, Y)
    bad = int(np.sum(q > space.distance(X, Y)))
    out.append(Assertion(f"{sys.name}: sampled pairs with quotient distance > d (10000)", bad, "0", "exact",
                         bad == 0))
    zero = max(quotient_distance(sample, space, d, i) for d, i in zip(sys.jumps.points, sys.impulse.images))
    out.append(Assertion(f"{sys.name}: quotient distance between D and its image", zero, "0", "exact",
                         zero == 0.0))
    # sampled trajectories: consecutive samples straddling an impulse stay close in the quotient
    h = 0.01
    speed = max(float(np.linalg.norm(sys.flow.velocity(p))) for p in regular_grid(space, 16).points)
    worst, count = 0.0, 0
    for x in space.random_points(20, rng):
        rec = impulsive_trajectory(sys, x, 5.0)
        ts = np.arange(0.0, 5.0 + 1e-12, h)
        states = rec.state_at(ts)
        for tau in rec.impulse_times:
            k = int(np.searchsorted(ts, tau, side="right")) - 1
            if 0 <= k < len(ts) - 1:
                worst = max(worst, quotient_distance(sample, space, states[k], states[k + 1]))
                count += 1
    out.append(Assertion(f"{sys.name}: quotient distance across {count} sampled jumps", worst,
                         f"<= {2 * h * speed:.3g}", "2 x sampling mesh", worst <= 2 * h * speed + 1e-12))
    worst = 0.0
    for x in space.random_points(200, rng):
        if classify_region(sys, x) is not Region.IN_X_XI:
            continue
        t = float(rng.random() * 3.0)
        a = project_and_flow_quotient(sys, sample, t, x)
        b = representative(sys, psi(sys, t, x))
        worst = max(worst, quotient_distance(sample, space, a, b))
    out.append(Assertion(f"{sys.name}: semiconjugacy defect on samples", worst, "0", "1e-9", worst <= 1e-9))
    return out


def mechanics(sys=None, T: float = 50.0) -> list[Assertion]:
    """Impulse times of the orbit of 0 on the impulsive circle are the multiples of 0.5."""
    sys = sys or get_system("impulsive_circle")
    rec = impulsive_trajectory(sys, [0.0], T)
    expected = 0.5 * np.arange(1, int(round(T / 0.5)) + 1)
    out = [Assertion(f"{sys.name}: impulse count up to T={T:g}", len(rec.impulse_times), str(len(expected)),
                     "exact", len(rec.impulse_times) == len(expected))]
    if len(rec.impulse_times) == len(expected):
        err = float(np.max(np.abs(rec.impulse_times - expected)))
        out.append(Assertion(f"{sys.name}: max impulse time error", err, "0", "1e-9", err <= 1e-9))
    eta = float(np.min(np.diff(rec.impulse_times))) if len(rec.impulse_times) > 1 else math.inf
    out.append(Assertion(f"{sys.name}: measured impulse spacing", eta, f">= {sys.xi:g}", "exact",
                         eta >= sys.xi))
    return out


def conditions(cfg=None, threads: int = 1, seed: int = 0, samples: int = 1000) -> list[Assertion]:
    if cfg is None:
        systems = [(name, get_system(name)) for name in SHIPPED_SYSTEMS]
    else:
        systems = [(cfg.system_id, cfg.system)]
    out = []
    for name, sys in systems:
        n = samples if name == "impulsive_circle" else min(samples, 200)
        report = validate_conditions(sys, n, seed=seed)
        for r in report.results:
            out.append(Assertion(f"{sys.name}: {r.name} [{r.status}] {r.detail}",
                                 r.value if r.value is not None else float("nan"), "no fail", "-",
                                 r.status != "fail"))
        if name == "impulsive_circle":
            out.extend(mechanics(sys))
    return out


SUITE_FUNCS = {
    "continuous-coincidence": continuous_coincidence,
    "inequalities": inequalities,
    "variational": variational,
    "quotient": quotient,
    "conditions": conditions,
}


def run_suite(name: str, cfg=None, threads: int = 1, seed: int = 0) -> list[Assertion]:
    fn = SUITE_FUNCS[name]
    if name in ("quotient", "conditions"):
        return fn(cfg, threads=threads, seed=seed)
    return fn(cfg, threads=threads)
