import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impulsive_pressure.flows import (OdeField, RotationCircle, SuspensionDoubling, TranslationInterval,
                                      evaluate, sample_orbit, sample_times)
from impulsive_pressure.geometry import Space
from impulsive_pressure.systems import get_system


def test_rotation_evaluate():
    assert evaluate(RotationCircle(1.0), 0.3, [0.9])[0] == pytest.approx(0.2, abs=1e-15)


@pytest.mark.parametrize("flow,x", [(RotationCircle(1.0), [0.3]), (TranslationInterval(), [0.4]),
                                    (SuspensionDoubling(), [0.3, 0.2])])
def test_identity_at_zero(flow, x):
    assert np.array_equal(evaluate(flow, 0.0, x), flow.space.normalize(x))


def test_suspension_roof_crossing():
    fl = SuspensionDoubling()
    assert np.allclose(evaluate(fl, 1.0, [0.3, 0.0]), [0.6, 0.0], atol=1e-12)
    half = evaluate(fl, 0.5, evaluate(fl, 0.5, [0.3, 0.0]))
    assert fl.space.distance(half, evaluate(fl, 1.0, [0.3, 0.0])) < 1e-12


def test_sample_times():
    assert np.allclose(sample_times(1.0, 0.5), [0, 0.5, 1.0])


def test_sample_orbit_rotation():
    states = [s[0] for _, s in sample_orbit(RotationCircle(1.0), [0.0], 1.0, 0.25)]
    d = Space.circle().distance(np.array(states)[:, None], np.array([0, .25, .5, .75, 0])[:, None])
    assert d.max() < 1e-12


def test_ode_unit_field_matches_rotation():
    fl = OdeField("constant", {"velocity": [1.0]}, 0.1, Space.circle())
    end = evaluate(fl, 1.0, [0.0])
    assert Space.circle().distance(end, np.array([0.0])) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 3), st.floats(0, 3), st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_semigroup_closed_form(s, t, a, b):
    for fl, x in ((RotationCircle(1.3), [a]), (SuspensionDoubling(), [a, b])):
        lhs = evaluate(fl, s + t, x)
        rhs = evaluate(fl, s, evaluate(fl, t, x))
        # the doubling map expands errors by 2 per roof crossing
        assert fl.space.distance(lhs, rhs) <= 1e-9 * 2 ** (s + t + 1)


def test_semigroup_ode_field():
    sys = get_system("ode_circle")
    fl = sys.flow
    h = fl.step
    for x in (0.1, 0.37, 0.8):
        lhs = evaluate(fl, 0.7, [x])
        rhs = evaluate(fl, 0.3, evaluate(fl, 0.4, [x]))
        assert fl.space.distance(lhs, rhs) <= 10 * h**4 * 0.7
