"""
Tests for grids, fields and the spectral multipliers
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from pydantic import ValidationError

from hwmlab.errors import ConstraintViolation, GridMismatch, MeanNotZero, NonFiniteField, ParameterOutOfRange
from hwmlab.sampling import band_limited_field, band_limited_vector
from hwmlab.spectral_core import (
    ScalarField,
    SpectralMultiplier,
    SphereField,
    TorusGrid,
    VectorField3,
    ZeroModePolicy,
    apply_multiplier,
    fractional_laplacian,
    gradient,
    laplacian,
    partial_derivative,
    project_mean,
    riesz_potential,
    riesz_transform,
)

LINE = TorusGrid.cube(1, 64)
PLANE = TorusGrid.cube(2, 32)
BOX = TorusGrid(sizes=(16, 12, 8), lengths=(2 * math.pi, 3.0, 5.0))


class TestTorusGrid:
    def test_cube(self):
        grid = TorusGrid.cube(3, 16)
        assert grid.dim == 3
        assert grid.shape == (16, 16, 16)
        assert grid.cell_volume == pytest.approx((2 * math.pi / 16) ** 3)

    @pytest.mark.parametrize("sizes", [(7,), (6,), (10, 9)])
    def test_rejects_bad_sizes(self, sizes):
        with pytest.raises(ValidationError, match="even and >= 8"):
            TorusGrid(sizes=sizes, lengths=(1.0,) * len(sizes))

    def test_rejects_rank_mismatch(self):
        with pytest.raises(ValidationError, match="same rank"):
            TorusGrid(sizes=(8, 8), lengths=(1.0,))

    def test_rejects_dimension_six(self):
        with pytest.raises(ValidationError, match="1..5"):
            TorusGrid.cube(6, 8)

    def test_wavenumbers_follow_box_length(self):
        ks = BOX.wavenumbers()
        assert ks[1].ravel()[1] == pytest.approx(2 * math.pi / 3.0)
        assert ks[2].ravel()[-1] == pytest.approx(2 * math.pi * 4 / 5.0)


class TestFields:
    def test_values_are_read_only(self):
        f = ScalarField.zeros(LINE)
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_non_finite_rejected(self):
        values = np.zeros(LINE.shape)
        values[3] = np.nan
        with pytest.raises(NonFiniteField):
            ScalarField(LINE, values)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatch):
            ScalarField.zeros(LINE) + ScalarField.zeros(TorusGrid.cube(1, 32))

    def test_sphere_constraint(self):
        with pytest.raises(ConstraintViolation):
            SphereField(LINE, 1.01 * SphereField.equator_map(LINE).values)

    def test_normalize(self):
        u = SphereField.normalize(band_limited_vector(PLANE, 3, band=3, mean_zero=False) + 5.0)
        assert np.max(np.abs(u.norm().values - 1.0)) <= 1e-12

    def test_cross_and_dot(self):
        u = SphereField.equator_map(LINE)
        e3 = VectorField3.constant(LINE, [0.0, 0.0, 1.0])
        assert np.max(np.abs(u.cross(e3).dot(u).values)) < 1e-15
        assert_allclose(u.cross(u).values, 0.0, atol=1e-15)


class TestMultipliers:
    @pytest.mark.parametrize("s", [0.3, 1.0, 1.7])
    def test_pure_mode(self, s):
        x = BOX.coordinates()[1]
        k = 2 * math.pi * 2 / 3.0
        f = ScalarField(BOX, np.cos(k * x))
        assert_allclose(fractional_laplacian(f, s).values, k ** s * f.values, atol=1e-12 * k ** s)

    def test_half_laplacian_squared_is_minus_laplacian(self):
        f = band_limited_field(PLANE, 1, band=4)
        twice = fractional_laplacian(fractional_laplacian(f, 1.0), 1.0)
        assert_allclose(twice.values, -laplacian(f).values, atol=1e-11 * np.max(np.abs(twice.values)))

    def test_riesz_round_trip(self):
        f = band_limited_field(PLANE, 2, band=4, mean_zero=False)
        back = riesz_potential(fractional_laplacian(f, 0.7), 0.7)
        assert_allclose(back.values, (f - f.mean()).values, atol=1e-11)

    def test_riesz_potential_needs_mean_zero(self):
        f = band_limited_field(PLANE, 2, band=4, mean_zero=False) + 1.0
        with pytest.raises(MeanNotZero):
            riesz_potential(f, 0.5)
        riesz_potential(f, 0.5, project=True)

    def test_riesz_potential_order_range(self):
        f = band_limited_field(LINE, 0)
        with pytest.raises(ParameterOutOfRange, match="Riesz potential order"):
            riesz_potential(f, 1.0)

    def test_identity_zero_mode_policy_keeps_mean(self):
        f = ScalarField.constant(LINE, 2.0)
        m = SpectralMultiplier.riesz_potential(0.5, zero_mode=ZeroModePolicy.IDENTITY)
        assert_allclose(apply_multiplier(f, m).values, 2.0)

    def test_odd_symbols_zero_nyquist(self):
        x = LINE.coordinates()[0]
        nyquist = ScalarField(LINE, np.cos(32 * x))
        assert partial_derivative(nyquist, 0).max_abs() < 1e-12
        assert riesz_transform(nyquist, 0).max_abs() < 1e-12
        assert fractional_laplacian(nyquist, 1.0).max_abs() == pytest.approx(32.0)

    def test_riesz_transforms_square_to_minus_identity(self):
        f = band_limited_field(PLANE, 5, band=4)
        total = sum((riesz_transform(riesz_transform(f, j), j) for j in range(2)), ScalarField.zeros(PLANE))
        assert_allclose(total.values, -f.values, atol=1e-12)

    def test_vector_lift_is_componentwise(self):
        u = band_limited_vector(PLANE, 4, band=3)
        lifted = fractional_laplacian(u, 0.5)
        for i in range(3):
            assert_allclose(lifted.component(i).values, fractional_laplacian(u.component(i), 0.5).values)

    def test_gradient_count(self):
        assert len(gradient(band_limited_field(BOX, 0, band=3))) == 3

    def test_project_mean(self):
        f = band_limited_field(LINE, 3, mean_zero=False)
        assert abs(project_mean(f).mean()) < 1e-15

    @given(
        a=st.floats(-10, 10),
        b=st.floats(-10, 10),
        s=st.floats(0.05, 1.95),
        seed=st.integers(0, 2**16),
    )
    def test_linearity(self, a, b, s, seed):
        f = band_limited_field(LINE, seed, band=5)
        g = band_limited_field(LINE, seed + 1, band=5)
        lhs = fractional_laplacian(f * a + g * b, s)
        rhs = fractional_laplacian(f, s) * a + fractional_laplacian(g, s) * b
        assert_allclose(lhs.values, rhs.values, atol=1e-12 * (1 + abs(a) + abs(b)) * 32)
