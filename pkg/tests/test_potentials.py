import math

import numpy as np
import pytest

from impulsive_pressure.errors import InvalidInputError
from impulsive_pressure.geometry import Space
from impulsive_pressure.potentials import (Constant, FourierCircle, Tabulated, check_jump_compatible,
                                           eval_potential, probe_bounded_distortion)
from impulsive_pressure.systems import get_system

C = Space.circle()


def test_constant():
    assert eval_potential(Constant(0.7), C, [0.123]) == 0.7


def test_sine_quarter():
    assert eval_potential(FourierCircle.sine(), C, [0.25]) == pytest.approx(1.0, abs=1e-15)


def test_tabulated_interpolation():
    f = Tabulated([0.0, 1 / 3, 2 / 3], [1.0, 2.0, 3.0], periodic=True)
    assert eval_potential(f, C, [1 / 6]) == pytest.approx(1.5)
    # periodic wrap interpolates back to the first node
    assert eval_potential(f, C, [5 / 6]) == pytest.approx(2.0)


def test_tabulated_validation():
    with pytest.raises(InvalidInputError):
        Tabulated([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(InvalidInputError):
        Tabulated([0.0, 0.5], [1.0])


def test_fourier_bad_frequency():
    with pytest.raises(InvalidInputError):
        FourierCircle(((0, 1.0, 0.0),))


def test_vectorised_matches_scalar(rng):
    f = FourierCircle(((1, 0.3, 1.0), (3, 0.0, -0.2)), 0.1)
    xs = rng.random((50, 1))
    vec = eval_potential(f, C, xs)
    assert np.allclose(vec, [eval_potential(f, C, x) for x in xs])
    assert np.max(np.abs(vec)) <= f.sup_norm()


def test_jump_compatibility(circle_sys):
    assert check_jump_compatible(FourierCircle.sine(), circle_sys).passed
    cos = FourierCircle(((1, 1.0, 0.0),))
    rep = check_jump_compatible(cos, circle_sys)
    assert not rep.passed and rep.worst == pytest.approx(2.0)
    assert check_jump_compatible(Constant(3.0), circle_sys).passed


def test_distortion_constant(circle_sys):
    rep = probe_bounded_distortion(Constant(1.5), circle_sys, 0.01, trials=5)
    assert rep.K_hat == 0.0


def test_distortion_rotation_lipschitz_bound(rotation_sys):
    eps = 0.01
    rep = probe_bounded_distortion(FourierCircle.sine(False), rotation_sys, eps, trials=20, t_max=50)
    lip = 2 * math.pi
    for t, k in rep.table:
        # pairs start eps/2 apart on an isometry
        assert k <= lip * eps * t + 1e-9


def test_distortion_impulsive_no_growth(circle_sys):
    rep = probe_bounded_distortion(FourierCircle.sine(), circle_sys, 0.01, trials=20, t_max=100)
    assert not rep.growing
    assert rep.K_hat < 1.0
