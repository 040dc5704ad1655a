import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impulsive_pressure.errors import DomainError, InvalidInputError, SpacingViolationError
from impulsive_pressure.flows import RotationCircle, TranslationInterval
from impulsive_pressure.impulsive import (ImpulsiveSystem, Region, classify_region, first_hitting_time,
                                          impulsive_trajectory, psi, push_to_x_xi, tau_star,
                                          validate_conditions)
from impulsive_pressure.geometry import Space
from impulsive_pressure.systems import get_system


def _circle_dist(a, b):
    return Space.circle().distance(np.atleast_1d(a), np.atleast_1d(b))


def test_first_hit_linear(circle_sys):
    assert first_hitting_time(circle_sys, [0.3], 10.0) == pytest.approx(0.2, abs=1e-12)


def test_first_hit_is_strict(circle_sys):
    # the infimum over t > 0 wraps a full turn from a point of D
    assert first_hitting_time(circle_sys, [0.5], 10.0) == pytest.approx(1.0, abs=1e-12)


def test_first_hit_beyond_horizon(circle_sys):
    assert first_hitting_time(circle_sys, [0.7], 0.5) is None


def test_trajectory_hand_iterated(circle_sys):
    rec = impulsive_trajectory(circle_sys, [0.0], 1.2)
    assert np.allclose(rec.impulse_times, [0.5, 1.0], atol=1e-12)
    s = rec.state_at([0.5, 1.2])
    assert _circle_dist(s[0], 0.0) < 1e-12
    assert _circle_dist(s[1], 0.2) < 1e-12


def test_segments_start_at_images(circle_sys):
    rec = impulsive_trajectory(circle_sys, [0.2], 3.0)
    for k in range(1, len(rec.starts)):
        assert np.allclose(rec.points[k], circle_sys.impulse.images[rec.jump_indices[k - 1]])
    # the flow endpoint of each segment is the jump point
    for k, (t0, p, dur) in enumerate(rec.segments[:-1]):
        end = circle_sys.flow.orbit(p, [dur])[0]
        assert _circle_dist(end, rec.jump_points[k]) < 1e-9


def test_never_hit_is_pure_flow():
    sys = ImpulsiveSystem.build(TranslationInterval(-1.0, Space.interval()), [[0.5]], [[0.9]], xi=0.1)
    rec = impulsive_trajectory(sys, [0.3], 2.0)
    assert len(rec.impulse_times) == 0
    assert rec.state_at([0.2])[0, 0] == pytest.approx(0.1)


def test_start_in_d_no_early_impulse(circle_sys):
    rec = impulsive_trajectory(circle_sys, [0.5], 0.4)
    assert len(rec.impulse_times) == 0


def test_psi_examples(circle_sys):
    assert np.array_equal(psi(circle_sys, 0.0, [0.3]), np.array([0.3]))
    assert _circle_dist(psi(circle_sys, 0.75, [0.0]), 0.25) < 1e-12


def test_psi_semiflow_law_random(circle_sys, rng):
    worst = 0.0
    for _ in range(1000):
        x = rng.random()
        s, t = rng.random() * 3, rng.random() * 3
        lhs = psi(circle_sys, s + t, [x])
        rhs = psi(circle_sys, s, psi(circle_sys, t, [x]))
        worst = max(worst, float(_circle_dist(lhs, rhs)))
    assert worst <= 1e-9


def test_right_continuity_at_impulses(circle_sys):
    rec = impulsive_trajectory(circle_sys, [0.1], 3.0)
    for tau in rec.impulse_times:
        a = rec.state_at([tau])[0]
        b = rec.state_at([tau + 1e-10])[0]
        assert _circle_dist(a, b) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 2), st.floats(0, 2))
def test_semiflow_law_interval(x, s, t):
    sys = get_system("interval_translation")
    lhs = psi(sys, s + t, [x])
    rhs = psi(sys, s, psi(sys, t, [x]))
    assert abs(lhs[0] - rhs[0]) <= 1e-9


def test_classify(circle_sys):
    assert classify_region(circle_sys, [0.55]) is Region.IN_D_XI
    assert classify_region(circle_sys, [0.5]) is Region.IN_D
    assert classify_region(circle_sys, [0.3]) is Region.IN_X_XI
    assert classify_region(circle_sys, [0.6]) is Region.IN_X_XI


def test_tau_star(circle_sys):
    assert tau_star(circle_sys, [0.5]) == 0.0
    assert tau_star(circle_sys, [0.3]) == pytest.approx(0.2)
    with pytest.raises(DomainError):
        tau_star(circle_sys, [0.55])


def test_push_to_x_xi(circle_sys):
    assert np.allclose(push_to_x_xi(circle_sys, [0.3]), [0.3])
    assert _circle_dist(push_to_x_xi(circle_sys, [0.55]), 0.6) < 1e-9


def test_event_tol_bound():
    with pytest.raises(InvalidInputError):
        ImpulsiveSystem.build(RotationCircle(1.0), [[0.5]], [[0.0]], xi=0.1, event_tol=0.05)


def test_spacing_guard():
    sys = ImpulsiveSystem.build(RotationCircle(1.0), [[0.5]], [[0.49]], xi=0.1)
    with pytest.raises(SpacingViolationError):
        impulsive_trajectory(sys, [0.0], 5.0)


def test_validate_circle_example(circle_sys):
    rep = validate_conditions(circle_sys, 1000, seed=0)
    assert rep.passed
    assert rep.status("image-disjoint") == "pass"
    assert rep.status("forward-invariance") == "pass"
    assert rep.eta is not None and rep.eta >= circle_sys.xi


def test_validate_image_in_d_fails():
    sys = ImpulsiveSystem.build(RotationCircle(1.0), [[0.5]], [[0.5]], xi=0.1)
    rep = validate_conditions(sys, 50, seed=0)
    assert rep.status("image-disjoint") == "fail"
    assert not rep.passed


def test_validate_expanding_lipschitz_fails():
    sys = ImpulsiveSystem.build(RotationCircle(1.0), [[0.4], [0.45]], [[0.0], [0.2]], xi=0.02)
    rep = validate_conditions(sys, 50, seed=0)
    assert rep.status("image-lipschitz") == "fail"


def test_horizon_must_be_positive(circle_sys):
    with pytest.raises(InvalidInputError):
        impulsive_trajectory(circle_sys, [0.0], 0.0)
    assert math.isfinite(first_hitting_time(circle_sys, [0.0], 1.0))
