"""
Tests for the Leibniz operators, their oracles and the commutator quotients
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from hwmlab.commutator_ops import (
    KernelQuadratureConfig,
    QuadratureMode,
    TripleVariant,
    adjoint_leibniz,
    commutator_cross,
    double_commutator,
    double_commutator_symbol_oracle,
    fractional_laplacian_oracle,
    leibniz,
    leibniz_cross,
    leibniz_dot,
    leibniz_oracle,
    leibniz_split_quotient,
    leibniz_energy_quotient,
    pair_kernel_quotient,
    pair_kernel_value,
    periodized_kernel,
    triple_kernel_quotient,
    triple_kernel_shifted_quotient,
    triple_kernel_value,
    trilinear_commutator,
)
from hwmlab.errors import ParameterOutOfRange, SupportTooWide, UnsupportedDimension
from hwmlab.sampling import band_limited_field, band_limited_vector, bump_profile
from hwmlab.spectral_core import ScalarField, TorusGrid, fractional_laplacian

LINE = TorusGrid.cube(1, 64)
PLANE = TorusGrid.cube(2, 32)


def _cos(grid, mode=1):
    x = grid.coordinates()[0] * (2 * math.pi / grid.lengths[0])
    return ScalarField(grid, np.cos(mode * x))


def _bumps(grid):
    length = grid.lengths[0]
    return (
        bump_profile(grid, radius=length / 20),
        bump_profile(grid, center=[length / 2 + length / 100], radius=length / 20),
    )


def _rescaled_pair(grid):
    length = grid.lengths[0]
    return (
        bump_profile(grid, center=[length / 4], radius=length / 25),
        bump_profile(grid, center=[length / 4 + length / 60], radius=length / 30) * 2.0,
    )


class TestLeibniz:
    def test_cos_cos_closed_form(self):
        # D(cos²) = D(½cos 2x) = cos 2x, and 2 cos D cos = 2cos² = 1 + cos 2x
        c = _cos(LINE)
        assert_allclose(leibniz(c, c, 1.0).values, -1.0, atol=1e-10)

    def test_order_range(self):
        c = _cos(LINE)
        with pytest.raises(ParameterOutOfRange):
            leibniz(c, c, 2.0)

    @given(seed=st.integers(0, 10_000), s=st.floats(0.1, 1.9))
    def test_symmetric(self, seed, s):
        f, g = band_limited_field(LINE, seed), band_limited_field(LINE, seed + 1)
        assert_allclose(leibniz(f, g, s).values, leibniz(g, f, s).values, atol=1e-12)

    def test_constant_factor_annihilates(self):
        f = band_limited_field(PLANE, 3)
        assert leibniz(f, ScalarField.constant(PLANE, 2.0), 1.0).max_abs() < 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_adjointness(self, seed):
        f, g, h = (band_limited_field(PLANE, 10 * seed + i, mean_zero=False) for i in range(3))
        lhs = (adjoint_leibniz(f, g, 0.5) * h).integral()
        rhs = (g * leibniz(f, h, 0.5)).integral()
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_vector_notations(self):
        a, b = band_limited_vector(PLANE, 1, band=3), band_limited_vector(PLANE, 2, band=3)
        dot = leibniz_dot(a, b)
        by_hand = sum((leibniz(x, y, 1.0) for x, y in zip(a.components(), b.components())), ScalarField.zeros(PLANE))
        assert_allclose(dot.values, by_hand.values, atol=1e-12)
        split = leibniz_cross(a, b) + fractional_laplacian(a, 1.0).cross(b)
        assert_allclose(split.values, commutator_cross(a, b).values, atol=1e-12)

    def test_trilinear_is_symmetric(self):
        a, b, c = (band_limited_field(LINE, i) for i in range(3))
        t = trilinear_commutator(a, b, c)
        assert_allclose(trilinear_commutator(c, a, b).values, t.values, atol=1e-12)
        assert_allclose(trilinear_commutator(b, c, a).values, t.values, atol=1e-12)


class TestDoubleCommutator:
    @pytest.mark.parametrize("alpha, beta", [(0.5, 0.75), (1.0, 1.0), (0.3, 0.9)])
    def test_matches_symbol_oracle(self, alpha, beta):
        f, g = band_limited_field(LINE, 7, band=5), band_limited_field(LINE, 8, band=5)
        spectral = double_commutator(f, g, alpha, beta)
        direct = double_commutator_symbol_oracle(f, g, alpha, beta)
        assert_allclose(spectral.values, direct.values, atol=1e-10 * spectral.max_abs())

    def test_symmetric_in_orders(self):
        f, g = band_limited_field(PLANE, 1, band=4), band_limited_field(PLANE, 2, band=4)
        assert_allclose(
            double_commutator(f, g, 0.5, 1.0).values, double_commutator(f, g, 1.0, 0.5).values, atol=1e-11
        )

    def test_oracle_detects_aliasing(self):
        f = band_limited_field(TorusGrid.cube(1, 16), 0, band=7)
        with pytest.raises(ParameterOutOfRange, match="aliases"):
            double_commutator_symbol_oracle(f, f, 0.5, 0.5)

    def test_order_range(self):
        f = band_limited_field(LINE, 0)
        with pytest.raises(ParameterOutOfRange, match="beta"):
            double_commutator(f, f, 0.5, 1.5)


class TestKernelOracles:
    def test_periodized_kernel_dominant_term(self):
        h = np.array([1e-3])
        assert periodized_kernel(h, 2 * math.pi, 2.0)[0] == pytest.approx(1e6, rel=1e-3)

    def test_leibniz_oracle_fit(self):
        grid = TorusGrid.cube(1, 4096)
        fit = leibniz_oracle(*_bumps(grid), 1.0)
        assert fit.residual <= 1e-3
        assert fit.fitted_c < 0

    @pytest.mark.parametrize("s", [0.5, 1.0])
    def test_leibniz_oracle_independent_pairs_agree(self, s):
        grid = TorusGrid.cube(1, 4096)
        bump, _ = _bumps(grid)
        same = leibniz_oracle(bump, bump, s)
        other = leibniz_oracle(*_rescaled_pair(grid), s)
        assert max(same.residual, other.residual) <= 1e-3
        assert other.fitted_c == pytest.approx(same.fitted_c, rel=0.01)

    def test_half_order_constant(self):
        bump, _ = _bumps(TorusGrid.cube(1, 4096))
        assert leibniz_oracle(bump, bump, 0.5).fitted_c == pytest.approx(-0.199471, rel=1e-3)

    @pytest.mark.parametrize("correction", [False, True])
    def test_residual_halves_per_doubling(self, correction):
        cfg = KernelQuadratureConfig(singular_correction=correction)
        residuals = [leibniz_oracle(*_bumps(TorusGrid.cube(1, n)), 1.0, cfg).residual for n in (1024, 2048)]
        assert residuals[1] <= 0.5 * residuals[0]

    def test_leibniz_first_difference_mode(self):
        grid = TorusGrid.cube(1, 1024)
        f, g = _bumps(grid)
        symmetric = leibniz_oracle(f, g, 0.5)
        composed = leibniz_oracle(f, g, 0.5, KernelQuadratureConfig(mode=QuadratureMode.FIRST_DIFFERENCE))
        assert composed.fitted_c == pytest.approx(symmetric.fitted_c, rel=1e-6)
        assert_allclose(composed.field.values, symmetric.field.values, atol=1e-6 * symmetric.field.max_abs())
        with pytest.raises(ParameterOutOfRange, match="first-difference"):
            leibniz_oracle(f, g, 1.5, KernelQuadratureConfig(mode=QuadratureMode.FIRST_DIFFERENCE))

    def test_zero_input_skips_fit(self):
        f, _ = _bumps(TorusGrid.cube(1, 256))
        fit = leibniz_oracle(f, ScalarField.zeros(f.grid), 1.0)
        assert math.isnan(fit.fitted_c)
        assert fit.field.max_abs() == 0

    def test_support_too_wide(self):
        with pytest.raises(SupportTooWide):
            leibniz_oracle(_cos(LINE), _cos(LINE), 1.0)

    def test_line_only(self):
        f = band_limited_field(PLANE, 0)
        with pytest.raises(UnsupportedDimension):
            leibniz_oracle(f, f, 1.0)

    def test_fractional_laplacian_oracle(self):
        f, _ = _bumps(TorusGrid.cube(1, 2048))
        fit = fractional_laplacian_oracle(f, 0.5)
        assert fit.fitted_c > 0
        assert fit.residual < 1e-2

    def test_first_difference_order_range(self):
        f, _ = _bumps(TorusGrid.cube(1, 256))
        cfg = KernelQuadratureConfig(mode=QuadratureMode.FIRST_DIFFERENCE)
        with pytest.raises(ParameterOutOfRange, match="first-difference"):
            fractional_laplacian_oracle(f, 1.5, cfg)

    def test_kernel_values_nonnegative(self):
        f, g, h = (band_limited_field(LINE, i) for i in range(3))
        assert np.all(pair_kernel_value(f, g, 0.5).values >= 0)
        for variant in TripleVariant:
            assert np.all(triple_kernel_value(f, g, h, variant).values >= 0)


class TestQuotients:
    def test_split_orders(self):
        f, g = band_limited_field(LINE, 0), band_limited_field(LINE, 1)
        assert 0 < leibniz_split_quotient(f, g, 1.0, 0.5, 4.0, 4.0) < math.inf
        with pytest.raises(ParameterOutOfRange, match="sigma"):
            leibniz_split_quotient(f, g, 0.5, 0.7, 4.0, 4.0)

    def test_energy_quotient_needs_two_dimensions(self):
        f = band_limited_field(LINE, 0)
        with pytest.raises(ParameterOutOfRange, match="d >= 2"):
            leibniz_energy_quotient(f, f)
        g = band_limited_field(PLANE, 0)
        assert leibniz_energy_quotient(g, g) > 0

    def test_pair_kernel_orders_must_sum(self):
        f = band_limited_field(LINE, 0)
        with pytest.raises(ParameterOutOfRange, match="must equal"):
            pair_kernel_quotient(f, f, 1.0, (0.3, 0.3), (4.0, 4.0))

    def test_triple_kernel(self):
        f, g, h = (band_limited_field(LINE, i) for i in range(3))
        third = 1 / 3
        assert 0 < triple_kernel_quotient(f, g, h, (third, third, third), (6.0, 6.0, 6.0)) < math.inf
        assert 0 < triple_kernel_shifted_quotient(f, g, h, (0.6, 0.6), (6.0, 6.0, 6.0)) < math.inf

    def test_shifted_needs_excess(self):
        f = band_limited_field(LINE, 0)
        with pytest.raises(ParameterOutOfRange, match="> 1"):
            triple_kernel_shifted_quotient(f, f, f, (0.4, 0.5), (6.0, 6.0, 6.0))
        with pytest.raises(ParameterOutOfRange, match="1/2"):
            triple_kernel_shifted_quotient(f, f, f, (0.8, 0.8), (6.0, 6.0, 6.0))
