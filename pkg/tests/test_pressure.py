import math

import numpy as np
import pytest

from impulsive_pressure.errors import InvalidInputError, UnsupportedSystemError
from impulsive_pressure.geometry import Space, regular_grid
from impulsive_pressure.potentials import Constant, FourierCircle, Tabulated
from impulsive_pressure.pressure import (ALL_KINDS, EstimatorKind, PressureEstimator, PressureTable, Row,
                                         Schedule, birkhoff_integral, build_separated, build_spanning,
                                         estimate_pressure, fit_slope, log_partition, partition_function,
                                         variational_oracle)
from impulsive_pressure.systems import get_system


# -- Birkhoff integrals -------------------------------------------------------

def test_birkhoff_constant_exact(circle_sys):
    assert birkhoff_integral(circle_sys, Constant(0.7), [0.2], 3.3, 0.01) == pytest.approx(0.7 * 3.3, abs=1e-12)


def test_birkhoff_rotation_full_period(rotation_sys):
    assert abs(birkhoff_integral(rotation_sys, FourierCircle.sine(False), [0.0], 1.0, 0.001)) < 1e-8


def test_birkhoff_closed_form_half_loop(circle_sys):
    # int_0^0.5 sin(2 pi s) ds = 1/pi
    got = birkhoff_integral(circle_sys, FourierCircle.sine(), [0.0], 0.5, 0.0005)
    assert got == pytest.approx(1 / math.pi, abs=1e-6)


def test_birkhoff_second_order(circle_sys):
    f = FourierCircle.sine()
    exact = 3 / math.pi  # three loops of the impulsive cycle
    e1 = abs(birkhoff_integral(circle_sys, f, [0.0], 1.5, 0.01) - exact)
    e2 = abs(birkhoff_integral(circle_sys, f, [0.0], 1.5, 0.005) - exact)
    assert e2 < e1 / 3


def test_birkhoff_rejects_bad_input(circle_sys):
    with pytest.raises(InvalidInputError):
        birkhoff_integral(circle_sys, Constant(1.0), [0.0], 0.0, 0.01)


# -- partition functions ------------------------------------------------------

def test_partition_examples():
    assert partition_function([0.0, 0.0, 0.0]) == pytest.approx(math.log(3))
    assert partition_function([0.0, math.log(3)]) == pytest.approx(math.log(4))
    assert partition_function([5000.0, 5000.0]) == pytest.approx(5000 + math.log(2))
    with pytest.raises(InvalidInputError):
        partition_function([])


def test_log_partition_constant(circle_sys):
    pts = np.array([[0.1], [0.2], [0.7]])
    assert log_partition(circle_sys, Constant(0.4), pts, 2.0, 0.01) == pytest.approx(math.log(3) + 0.8, abs=1e-12)


# -- greedy sets ----------------------------------------------------------------

def test_separated_rotation_packing(rotation_sys):
    g = regular_grid(Space.circle(), 100)
    for T in (1.0, 5.0):
        assert len(build_separated(rotation_sys, "classical_s", g, T, 0.3, 0.2)) == 3


def test_separated_large_eps(rotation_sys):
    g = regular_grid(Space.circle(), 100)
    assert len(build_separated(rotation_sys, "bar_s", g, 1.0, 0.6, 0.2)) == 1


def test_spanning_rotation_cover(rotation_sys):
    g = regular_grid(Space.circle(), 100)
    assert len(build_spanning(rotation_sys, "classical_r", g, 2.0, 0.3, 0.2)) == 2
    assert len(build_spanning(rotation_sys, "hat_r", g, 2.0, 0.6, 0.2)) == 1


def test_separated_is_maximal_and_spans(circle_sys):
    sched = Schedule((1.0, 2.0), (0.1,), (0.2,), regular_grid(circle_sys.space, 100), m=8)
    est = PressureEstimator(circle_sys, sched, [EstimatorKind.BAR_S, EstimatorKind.BAR_R])
    est.build()
    cache = est.cache(EstimatorKind.BAR_S.metric, 0.2)
    cache.fill_all()
    for c, T in enumerate(sched.T_list):
        members = list(est._sets[(EstimatorKind.BAR_S, T, 0.1, 0.2)])
        D = cache.values[:, :, c]
        sub = D[np.ix_(members, members)]
        assert np.all(sub[~np.eye(len(members), dtype=bool)] >= 0.1)
        # maximality: every rejected candidate is close to an accepted point
        rejected = np.setdiff1d(np.arange(len(D)), members)
        assert np.all((D[np.ix_(rejected, members)] < 0.1).any(axis=1))
        # which is the spanning property on the grid
        assert np.all((D[members] < 0.1).any(axis=0))


# -- schedules ------------------------------------------------------------------

def test_schedule_validation():
    g = regular_grid(Space.circle(), 40)
    with pytest.raises(InvalidInputError):
        Schedule((1.0, 2.0), (0.1, 0.2), (0.2,), g)
    with pytest.raises(InvalidInputError):
        Schedule((2.0, 1.0), (0.1,), (0.2,), g)
    with pytest.raises(InvalidInputError):
        Schedule((1.0,), (0.1,), (0.2, 0.07), g)
    with pytest.raises(InvalidInputError):
        Schedule((1.0,), (0.1,), (0.2,), g, m=1)


def test_schedule_nesting():
    s = Schedule((1.0,), (0.1,), (0.2, 0.1), regular_grid(Space.circle(), 40), m=16)
    assert s.fine_step() == pytest.approx(0.1 / 16)
    assert s.m_for(0.2) == 32 and s.m_for(0.1) == 16
    assert s.dt == pytest.approx(0.01)


def test_spanning_needs_fine_grid(circle_sys):
    s = Schedule((1.0,), (0.1,), (0.2,), regular_grid(circle_sys.space, 10))
    with pytest.raises(InvalidInputError):
        PressureEstimator(circle_sys, s, [EstimatorKind.HAT_R])
    PressureEstimator(circle_sys, s, [EstimatorKind.HAT_S])


# -- tables -----------------------------------------------------------------------

def test_fit_slope_tail_half():
    T = [1, 2, 3, 4]
    slope, res = fit_slope(T, [5.0, 0.0, 3.0, 5.0])
    assert slope == pytest.approx(2.0) and res == pytest.approx(0.0, abs=1e-12)
    slope, res = fit_slope([1, 2, 3], [0.0, 1.0, 3.0])
    assert slope == pytest.approx(2.0)


@pytest.fixture(scope="module")
def small_table():
    sys = get_system("impulsive_circle")
    sched = Schedule((2.0, 4.0), (0.2, 0.1), (0.2, 0.1), regular_grid(sys.space, 40), m=16)
    est = PressureEstimator(sys, sched, ALL_KINDS)
    return est, est.table(FourierCircle.sine())


def test_table_shape(small_table):
    est, t = small_table
    assert len(t.rows) == 6 * 2 * 2 * 2
    assert all(r.set_size >= 1 and math.isfinite(r.logZ) for r in t.rows)
    assert t.warnings == []
    assert all(r.seconds == 0.0 for r in t.rows)


def test_constant_shift_per_cell(small_table):
    est, base = small_table
    zero = est.table(Constant(0.0))
    shifted = est.table(Constant(0.3))
    for a, b in zip(zero.rows, shifted.rows):
        assert b.logZ - a.logZ == pytest.approx(0.3 * a.T, abs=1e-9)
    for k in zero.kinds():
        assert shifted.headline(k).slope - zero.headline(k).slope == pytest.approx(0.3, abs=1e-9)


def test_csv_round_trip(small_table, tmp_path):
    _, t = small_table
    text = t.to_csv(tmp_path / "t.csv", {"system": "impulsive_circle"})
    assert text.splitlines()[1] == "kind,T,eps,delta,logZ,set_size,seconds"
    back = PressureTable.from_csv(tmp_path / "t.csv")
    assert [(r.kind, r.T, r.eps, r.delta, r.logZ, r.set_size) for r in back.rows] == \
        [(r.kind, r.T, r.eps, r.delta, r.logZ, r.set_size) for r in t.rows]
    assert back.summary()["kinds"] == t.summary()["kinds"]


def test_from_csv_rejects_garbage(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInputError):
        PressureTable.from_csv(p)


def test_monotonicity_warning():
    rows = [Row("classical_s", 1.0, 0.2, 0.1, 2.0, 7, 0.0), Row("classical_s", 1.0, 0.1, 0.1, 1.0, 3, 0.0)]
    t = PressureTable(rows)
    assert len(t.check_monotonicity()) == 1


def test_rotation_zero_pressure():
    sys = get_system("rotation_circle")
    sched = Schedule((4.0, 8.0), (0.2, 0.1), (0.2,), regular_grid(sys.space, 80), m=16)
    t = estimate_pressure(sys, Constant(0.0), list(ALL_KINDS), sched)
    for k in t.kinds():
        assert abs(t.headline(k).slope) <= 0.02


def test_timing_column():
    sys = get_system("rotation_circle")
    sched = Schedule((1.0, 2.0), (0.2,), (0.2,), regular_grid(sys.space, 20), m=8)
    t = estimate_pressure(sys, Constant(0.0), "classical_s", sched, timing=True)
    assert all(r.seconds >= 0 for r in t.rows) and any(r.seconds > 0 for r in t.rows)


# -- oracle -----------------------------------------------------------------------

def test_variational_oracle_values():
    assert variational_oracle("impulsive_circle", Constant(0.4)) == pytest.approx(0.4)
    assert variational_oracle("impulsive_circle", FourierCircle.sine()) == pytest.approx(2 / math.pi)
    assert variational_oracle("rotation_circle", FourierCircle.sine()) == pytest.approx(0.0, abs=1e-15)
    assert variational_oracle("suspension_doubling", Constant(0.0)) == pytest.approx(math.log(2))
    tab = Tabulated([0.0, 0.5], [0.0, 1.0])
    assert variational_oracle("rotation_circle", tab) == pytest.approx(0.5)
    with pytest.raises(UnsupportedSystemError):
        variational_oracle("torus_rotation", Constant(0.0))
