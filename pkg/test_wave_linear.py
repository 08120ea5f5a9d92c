import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hwmlab.errors import ParameterOutOfRange
from hwmlab.sampling import band_limited_field
from hwmlab.spectral_core import ScalarField, TorusGrid, laplacian
from hwmlab.wave_linear import (
    ALPHA_RANGE_NOTE,
    duhamel,
    free_wave,
    stated_alpha_upper,
    strichartz_quotient,
    trapezoid_weights,
)

PLANE = TorusGrid.cube(2, 16)
HYPER = TorusGrid.cube(4, 8)


class TestFreeWave:
    def test_initial_data(self):
        f, g = band_limited_field(PLANE, 0, mean_zero=False), band_limited_field(PLANE, 1)
        state = free_wave(f, g, 0.0)
        assert_allclose(state.position.values, f.values, atol=1e-14)
        assert_allclose(state.velocity.values, g.values, atol=1e-14)

    def test_zero_mode_grows_linearly(self):
        g = ScalarField.constant(PLANE, 2.0)
        state = free_wave(ScalarField.zeros(PLANE), g, 3.0)
        assert_allclose(state.position.values, 6.0)

    def test_energy_conserved(self):
        f, g = band_limited_field(PLANE, 2), band_limited_field(PLANE, 3)
        e0 = free_wave(f, g, 0.0).energy()
        for t in (0.5, 1.7, 4.0):
            assert free_wave(f, g, t).energy() == pytest.approx(e0, rel=1e-12)

    def test_solves_wave_equation(self):
        f, g = band_limited_field(PLANE, 4), band_limited_field(PLANE, 5)
        h, t = 1e-3, 0.8
        second = (free_wave(f, g, t + h).position - 2.0 * free_wave(f, g, t).position + free_wave(f, g, t - h).position)
        residual = second / (h * h) - laplacian(free_wave(f, g, t).position)
        assert residual.max_abs() < 1e-3


class TestDuhamel:
    def test_constant_forcing(self):
        zero = ScalarField.zeros(PLANE)
        times = np.linspace(0.0, 2.0, 11)
        state = duhamel(zero, zero, [ScalarField.constant(PLANE, 1.5)] * 11, times)
        assert_allclose(state.position.values, 1.5 * 2.0 ** 2 / 2, rtol=1e-12)
        assert_allclose(state.velocity.values, 1.5 * 2.0, rtol=1e-12)

    def test_manufactured_solution_is_second_order(self):
        # u = cos(2kt)cos(kx) solves u_tt - Δu = -3k² cos(2kt)cos(kx)
        k = 2 * np.pi / PLANE.lengths[0]
        wave = np.cos(k * PLANE.coordinates()[0])
        f, g = ScalarField(PLANE, wave), ScalarField.zeros(PLANE)
        errors = []
        for count in (11, 21):
            times = np.linspace(0.0, 1.0, count)
            forcing = [ScalarField(PLANE, -3 * k ** 2 * np.cos(2 * k * s) * wave) for s in times]
            state = duhamel(f, g, forcing, times)
            errors.append(np.max(np.abs(state.position.values - np.cos(2 * k) * wave)))
        assert 3.5 <= errors[0] / errors[1] <= 4.5

    def test_non_uniform_grid(self):
        zero = ScalarField.zeros(PLANE)
        with pytest.raises(ParameterOutOfRange, match="uniform"):
            duhamel(zero, zero, [zero] * 3, [0.0, 0.1, 0.3])

    def test_forcing_count(self):
        zero = ScalarField.zeros(PLANE)
        with pytest.raises(ParameterOutOfRange, match="forcing samples"):
            duhamel(zero, zero, [zero] * 2, [0.0, 0.5, 1.0])

    def test_trapezoid_weights(self):
        assert_allclose(trapezoid_weights(np.linspace(0, 1, 5)), [0.125, 0.25, 0.25, 0.25, 0.125])


class TestStrichartz:
    def test_stated_range_is_empty_in_four_dimensions(self):
        assert stated_alpha_upper(4) == pytest.approx(1 / 6)
        assert "empty for d = 4" in ALPHA_RANGE_NOTE

    def test_quotient_finite(self):
        f, g = band_limited_field(HYPER, 0, band=2), band_limited_field(HYPER, 1, band=2)
        h0 = band_limited_field(HYPER, 2, band=2)
        forcing = [h0 * math.cos(t) for t in np.linspace(0.0, 1.0, 5)]
        q = strichartz_quotient(f, g, forcing, 1.5, 1.0, n_times=5)
        assert 0 < q < math.inf
        assert 0 < strichartz_quotient(f, g, None, 1.0, 1.0, n_times=5) < math.inf

    def test_needs_four_dimensions(self):
        f = band_limited_field(PLANE, 0)
        with pytest.raises(ParameterOutOfRange, match="d >= 4"):
            strichartz_quotient(f, f, None, 1.0, 1.0)

    def test_alpha_range(self):
        f = band_limited_field(HYPER, 0, band=2)
        with pytest.raises(ParameterOutOfRange, match="alpha"):
            strichartz_quotient(f, f, None, 0.5, 1.0)
