"""
Tests for the algebraic identity suite
"""
import numpy as np
import pytest

from hwmlab import identities
from hwmlab.errors import ConfigError
from hwmlab.models import IdentityReport
from hwmlab.sampling import random_sphere_pair
from hwmlab.spectral_core import SphereField, TorusGrid

LINE = TorusGrid.cube(1, 64)
PLANE = TorusGrid.cube(2, 16)


@pytest.fixture(scope="module")
def pair():
    return random_sphere_pair(LINE, 3, band=3)


@pytest.mark.parametrize("name", list(identities.ALL_IDENTITIES))
def test_identity_holds_on_random_pair(pair, name):
    u, v = pair
    result = identities.ALL_IDENTITIES[name](u, v, np.random.default_rng(0))
    if result.integral is not None:
        assert result.integral <= 1e-8
    else:
        assert result.pointwise <= 1e-9


@pytest.mark.parametrize("name", ["discrete_difference_trick", "determinant_cancellation_chain", "sphere_difference_splits"])
def test_identity_holds_in_two_dimensions(name):
    u, v = random_sphere_pair(PLANE, 5, band=3)
    result = identities.ALL_IDENTITIES[name](u, v, np.random.default_rng(1))
    assert (result.integral if result.integral is not None else result.pointwise) <= 1e-9


def test_constraint_identity_on_equator_map():
    u = SphereField.equator_map(LINE)
    result = identities.sphere_constraint_leibniz(u, u, np.random.default_rng(0))
    assert result.pointwise <= 1e-10


def test_splits_report_every_part(pair):
    result = identities.sphere_difference_splits(*pair, np.random.default_rng(0))
    assert set(result.parts) == {
        "energy_split",
        "tangential_split",
        "commutator_split",
        "commutator_exchange",
        "time_derivative_split",
        "constraint_commutator_split",
        "trilinear_exchange",
    }
    assert result.pointwise == max(result.parts.values())


def test_relative_error_scale_floor():
    assert identities.relative_error(np.array([1e-3]), np.array([0.0])) == pytest.approx(1e-3)
    assert identities.relative_error(np.array([200.0]), np.array([202.0])) == pytest.approx(0.01)


def test_suite_on_several_seeds():
    reports = identities.run_identity_suite(LINE, range(3), band=3)
    assert [r.identity for r in reports] == list(identities.ALL_IDENTITIES)
    assert all(r.samples == 3 for r in reports)
    assert identities.suite_passed(reports)
    chain = next(r for r in reports if r.identity == "determinant_cancellation_chain")
    assert chain.max_pointwise_error is None
    assert chain.tolerance == 1e-8


def test_suite_fails_when_a_required_identity_is_missing():
    reports = identities.run_identity_suite(LINE, [0], names=["triple_product_expansion"])
    assert reports[0].passed
    assert not identities.suite_passed(reports)


def test_failed_report_fails_suite():
    reports = identities.run_identity_suite(LINE, [0])
    broken = [r.model_copy(update={"passed": False}) if i == 0 else r for i, r in enumerate(reports)]
    assert isinstance(broken[0], IdentityReport)
    assert not identities.suite_passed(broken)


def test_unknown_identity():
    u, v = random_sphere_pair(LINE, 0)
    with pytest.raises(ConfigError, match="unknown identities"):
        identities.check_pair(u, v, 0, ["no_such_identity"])


def test_suite_needs_seeds():
    with pytest.raises(ConfigError):
        identities.run_identity_suite(LINE, [])
