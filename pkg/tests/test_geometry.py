import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impulsive_pressure.errors import InvalidInputError
from impulsive_pressure.geometry import Space, regular_grid, section_grid

unit = st.floats(0.0, 1.0, allow_nan=False, exclude_max=True)


def test_circle_distance_wraps():
    assert Space.circle().distance(np.array([0.1]), np.array([0.9])) == pytest.approx(0.2, abs=1e-15)


def test_interval_distance():
    assert Space.interval().distance(np.array([0.25]), np.array([0.75])) == 0.5


def test_torus_distance_brute_force():
    sp = Space.torus2()
    x, y = np.array([0.0, 0.0]), np.array([0.5, 0.5])
    # oracle: minimum over the wrap images of each coordinate
    best = min(math.hypot(0.5 + a, 0.5 + b) for a in (-1, 0, 1) for b in (-1, 0, 1))
    assert sp.distance(x, y) == pytest.approx(best, abs=1e-15)
    assert best == pytest.approx(math.sqrt(0.5))


def test_circle_grid_points_and_mesh():
    g = regular_grid(Space.circle(), 4)
    assert np.allclose(g.points[:, 0], [0, 0.25, 0.5, 0.75])
    assert g.mesh == 0.125


def test_interval_grid_two_points():
    g = regular_grid(Space.interval(), 2)
    assert np.allclose(g.points[:, 0], [0, 1])
    assert g.mesh == 0.5


def test_torus_grid_mesh_bound_brute_force():
    sp = Space.torus2()
    g = regular_grid(sp, 3)
    assert len(g) == 9
    assert g.mesh <= math.sqrt(2) / 6 + 1e-15
    a = np.arange(300) / 300
    fine = np.column_stack([np.repeat(a, 300), np.tile(a, 300)])
    worst = g.nearest_distance(fine).max()
    assert worst <= g.mesh + 1e-12


@pytest.mark.parametrize("space", [Space.circle(), Space.interval(), Space.suspension(1.0)])
def test_mesh_is_upper_bound(space, rng):
    g = regular_grid(space, 12)
    x = space.random_points(2000, rng)
    assert g.nearest_distance(x).max() <= g.mesh + 1e-12


def test_grid_points_distinct():
    for sp in (Space.circle(), Space.torus2(), Space.suspension()):
        g = regular_grid(sp, 6)
        d = sp.distance(g.points[:, None, :], g.points[None, :, :])
        assert np.all(d[~np.eye(len(g), dtype=bool)] > 0)


def test_section_grid_floor():
    g = section_grid(Space.suspension(), 64)
    assert len(g) == 64 and np.all(g.points[:, 1] == 0)


def test_bad_grid_size():
    with pytest.raises(InvalidInputError):
        regular_grid(Space.circle(), 1)


def test_wrong_shape_rejected():
    with pytest.raises(InvalidInputError):
        Space.torus2().normalize([0.1])


@settings(max_examples=200, deadline=None)
@given(unit, unit, unit, unit, unit, unit)
def test_metric_axioms(a, b, c, d, e, f):
    for sp, pts in ((Space.circle(), ([a], [b], [c])),
                    (Space.torus2(), ([a, b], [c, d], [e, f])),
                    (Space.suspension(1.0), ([a, b], [c, d], [e, f]))):
        x, y, z = (sp.normalize(p) for p in pts)
        dxy, dyz, dxz = sp.distance(x, y), sp.distance(y, z), sp.distance(x, z)
        assert sp.distance(x, x) == 0
        assert dxy == pytest.approx(sp.distance(y, x), abs=1e-15)
        assert dxz <= dxy + dyz + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5, allow_nan=False))
def test_circle_normalize_in_chart(a):
    v = Space.circle().normalize([a])[0]
    assert 0.0 <= v < 1.0
