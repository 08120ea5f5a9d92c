"""
Tests for L^p / Lorentz norms and the Sobolev-type quotients
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from hwmlab.errors import ParameterOutOfRange
from hwmlab.field_norms import (
    LorentzParams,
    build_quotient_report,
    gn_quotient,
    gns_quotient,
    gns_theta,
    lorentz_norm,
    lp_norm,
    ratio,
    sample_quotients,
    sobolev_quotient,
)
from hwmlab.sampling import band_limited_field, band_limited_vector
from hwmlab.spectral_core import ScalarField, TorusGrid

GRID = TorusGrid.cube(2, 16)


class TestNorms:
    def test_lp_of_constant(self):
        f = ScalarField.constant(GRID, 3.0)
        assert lp_norm(f, 2) == pytest.approx(3.0 * 2 * math.pi)
        assert lp_norm(f, math.inf) == 3.0

    def test_lorentz_diagonal_is_lp(self):
        f = band_limited_field(GRID, 1)
        assert lorentz_norm(f, LorentzParams(p=3.0, q=3.0)) == pytest.approx(lp_norm(f, 3.0), rel=1e-12)

    def test_vector_uses_euclidean_magnitude(self):
        u = band_limited_vector(GRID, 2)
        expected = math.sqrt(sum(lp_norm(c, 2) ** 2 for c in u.components()))
        assert lp_norm(u, 2) == pytest.approx(expected, rel=1e-12)

    def test_lorentz_params_validation(self):
        with pytest.raises(ValidationError):
            LorentzParams(p=1.0)
        with pytest.raises(ValidationError):
            LorentzParams(p=2.0, q=0.5)

    @given(c=st.floats(-1e3, 1e3), seed=st.integers(0, 1000))
    def test_lorentz_homogeneity(self, c, seed):
        f = band_limited_field(GRID, seed)
        lp = LorentzParams(p=4.0, q=2.0)
        assert lorentz_norm(f * c, lp) == pytest.approx(abs(c) * lorentz_norm(f, lp), rel=1e-12, abs=1e-300)

    @given(seed=st.integers(0, 1000), perm_seed=st.integers(0, 1000))
    def test_rearrangement_invariance(self, seed, perm_seed):
        f = band_limited_field(GRID, seed)
        shuffled = np.random.default_rng(perm_seed).permutation(f.values.ravel()).reshape(GRID.shape)
        lp = LorentzParams(p=2.5, q=1.5)
        assert lorentz_norm(ScalarField(GRID, shuffled), lp) == pytest.approx(lorentz_norm(f, lp), rel=1e-12)


class TestQuotients:
    def test_ratio_conventions(self):
        assert ratio(0.0, 0.0) == 0.0
        assert ratio(1.0, 0.0) == math.inf
        assert ratio(1.0, 4.0) == 0.25

    def test_sobolev_hypotheses(self):
        f = band_limited_field(GRID, 0)
        with pytest.raises(ParameterOutOfRange, match="alpha in"):
            sobolev_quotient(f, 2.5, 1.2)
        with pytest.raises(ParameterOutOfRange, match="p in"):
            sobolev_quotient(f, 1.0, 2.5)

    def test_sobolev_finite(self):
        f = band_limited_field(GRID, 0)
        assert 0 < sobolev_quotient(f, 0.5, 2.5) < math.inf
        assert 0 < sobolev_quotient(f, 0.5, 2.5, q=2.0) < math.inf

    def test_gn_positive(self):
        f = band_limited_field(GRID, 4)
        assert gn_quotient(f, 0.5, 4.0) > 0

    def test_gns_theta(self):
        assert gns_theta(0.75, 6.0, 2) == pytest.approx(2 * (0.75 - 2 / 6.0))
        with pytest.raises(ParameterOutOfRange, match="Gagliardo-Nirenberg-Sobolev"):
            gns_theta(0.75, 9.0, 2)
        assert gns_quotient(band_limited_field(GRID, 1), 0.75, 6.0) > 0

    def test_sample_quotients_keeps_order(self):
        assert sample_quotients(lambda s: float(s), [3, 1, 2], workers=3) == [3.0, 1.0, 2.0]

    def test_report_rejects_infinite(self):
        with pytest.raises(ValidationError):
            build_quotient_report("sobolev", {}, [1.0, math.inf], 0, GRID)

    def test_report_summary(self):
        report = build_quotient_report("sobolev", {"alpha": 0.5}, [1.0, 3.0, 2.0], 7, GRID)
        assert report.max == 3.0
        assert report.median == 2.0
        assert report.n_samples == 3
