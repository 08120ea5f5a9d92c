import numpy as np
import pytest
from numpy.testing import assert_allclose

from hwmlab.errors import ParameterOutOfRange
from hwmlab.sampling import (
    band_limited_field,
    bump_profile,
    random_sphere_field,
    random_sphere_pair,
    rotate_pointwise,
)
from hwmlab.spectral_core import ScalarField, SphereField, TorusGrid

GRID = TorusGrid.cube(2, 16)


def test_band_limited_is_deterministic():
    a = band_limited_field(GRID, 11)
    b = band_limited_field(GRID, 11)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, band_limited_field(GRID, 12).values)


def test_band_limited_is_resolution_independent():
    coarse = band_limited_field(TorusGrid.cube(1, 32), 5, band=4)
    fine = band_limited_field(TorusGrid.cube(1, 64), 5, band=4)
    assert_allclose(fine.values[::2], coarse.values, atol=1e-13)


def test_mean_zero():
    assert abs(band_limited_field(GRID, 3).mean()) < 1e-15
    assert abs(band_limited_field(GRID, 3, mean_zero=False).mean()) > 0


def test_band_must_be_resolved():
    with pytest.raises(ParameterOutOfRange, match="not resolved"):
        band_limited_field(GRID, 0, band=8)


def test_sphere_pair_is_unit_and_distinct():
    u, v = random_sphere_pair(GRID, 4, band=3)
    assert isinstance(v, SphereField)
    assert np.max(np.abs(v.norm().values - 1.0)) <= 1e-12
    assert (u - v).max_abs() > 0


def test_sphere_amplitude_guard():
    with pytest.raises(ParameterOutOfRange):
        random_sphere_field(GRID, 0, amplitude=0.9)


def test_rotation_by_zero_is_identity():
    u = random_sphere_field(GRID, 2)
    same = rotate_pointwise(u, (0.0, 0.0, 1.0), ScalarField.zeros(GRID))
    assert_allclose(same.values, u.values, atol=1e-15)


def test_rotation_about_own_direction_is_identity():
    u = SphereField.constant(GRID, (0.0, 0.0, 1.0))
    rotated = rotate_pointwise(u, (0.0, 0.0, 1.0), 0.7)
    assert_allclose(rotated.values, u.values, atol=1e-15)


def test_bump_profile_support():
    grid = TorusGrid.cube(1, 256)
    bump = bump_profile(grid, radius=0.5)
    x = grid.coordinates()[0]
    outside = np.abs(x - np.pi) >= 0.5
    assert np.all(bump.values[outside] == 0)
    assert bump.max_abs() == pytest.approx(np.exp(-1.0), rel=1e-3)
