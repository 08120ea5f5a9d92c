"""
Algebraic identity suite for pairs of sphere-valued fields.

Every check assembles its two sides independently from the spectral
operators and returns the relative error max|L - R| / max(1, max|L|, max|R|).
Pointwise checks compare fields; the determinant chain compares integrals.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional

import numpy as np

from hwmlab.commutator_ops import (
    commutator_cross,
    double_commutator,
    leibniz,
    leibniz_cross,
    leibniz_dot,
    trilinear_commutator,
)
from hwmlab.config import INTEGRAL_TOL, POINTWISE_TOL, WORKERS
from hwmlab.errors import ConfigError
from hwmlab.hwm_dynamics import gradient_density, hwm_rhs, waveform_rhs
from hwmlab.models import IdentityReport
from hwmlab.sampling import random_sphere_pair, random_unit_vector
from hwmlab.spectral_core import ScalarField, SphereField, TorusGrid, VectorField3, fractional_laplacian

logger = logging.getLogger(__name__)

# order used for the Leibniz exchange check
EXCHANGE_ORDER = 0.5
# pair offsets used by the discrete trick when the grid has more points than this
MAX_OFFSETS = 256


class CheckResult(NamedTuple):
    pointwise: Optional[float]
    integral: Optional[float]
    parts: Dict[str, float]


def relative_error(lhs, rhs) -> float:
    lhs = np.asarray(getattr(lhs, "values", lhs), dtype=float)
    rhs = np.asarray(getattr(rhs, "values", rhs), dtype=float)
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def _pointwise(error: float) -> CheckResult:
    return CheckResult(error, None, {})


def _D(f):
    return fractional_laplacian(f, 1.0)


def _levi_civita():
    for k, l, m in itertools.permutations(range(3)):
        sign = np.linalg.det(np.eye(3)[[k, l, m]])
        yield k, l, m, float(round(sign))


def triple_product_expansion(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """a∧(b∧c) = b(c·a) - c(a·b) on constant vectors and on field triples."""
    a, b, c = (VectorField3.constant(u.grid, random_unit_vector(rng) * rng.uniform(0.5, 2.0)) for _ in range(3))
    errors = []
    for x, y, z in ((a, b, c), (u, _D(v), v - u)):
        errors.append(relative_error(x.cross(y.cross(z)), y * z.dot(x) - z * x.dot(y)))
    return _pointwise(max(errors))


def lagrange_cross_dot(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """(a∧b)·(c∧d) = (a·c)(b·d) - (a·d)(c·b)."""
    a, b, c, d = u, _D(u), v, _D(v)
    lhs = a.cross(b).dot(c.cross(d))
    rhs = a.dot(c) * b.dot(d) - a.dot(d) * c.dot(b)
    return _pointwise(relative_error(lhs, rhs))


def determinant_triple_product(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """a·(b∧c) = det[a, b, c] with a, b, c as matrix rows."""
    a, b, c = u, _D(v), u - v
    lhs = a.dot(b.cross(c))
    rows = np.stack([a.values, b.values, c.values])  # (3 rows, 3 components, *grid)
    matrices = np.moveaxis(rows, (0, 1), (-2, -1))
    return _pointwise(relative_error(lhs, np.linalg.det(matrices)))


def struwe_orthogonality(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """<v, ∂_t(u - v)> = -<u - v, ∂_t u> with both time derivatives taken from the flow."""
    ut, vt = hwm_rhs(u), hwm_rhs(v)
    lhs = v.dot(ut - vt)
    rhs = -(u - v).dot(ut)
    return _pointwise(relative_error(lhs, rhs))


def _pair_offsets(size: int, rng: np.random.Generator) -> np.ndarray:
    if size - 1 <= MAX_OFFSETS:
        return np.arange(1, size)
    return np.sort(rng.choice(np.arange(1, size), size=MAX_OFFSETS, replace=False))


def discrete_difference_trick(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """a(x)·(b(x)-b(y)) = (a(x)-a(y))·(b(x)-b(y)) - (a(x)-a(y))·b(x) for a = u+v, b = u-v.

    Holds because a·b vanishes identically when |u| = |v|. Pairs (x, y) run
    over cyclic shifts of the flattened grid.
    """
    a = (u + v).values.reshape(3, -1)
    b = (u - v).values.reshape(3, -1)
    error = 0.0
    for shift in _pair_offsets(a.shape[1], rng):
        ay, by = np.roll(a, shift, axis=1), np.roll(b, shift, axis=1)
        lhs = np.sum(a * (b - by), axis=0)
        rhs = np.sum((a - ay) * (b - by), axis=0) - np.sum((a - ay) * b, axis=0)
        error = max(error, relative_error(lhs, rhs))
    return _pointwise(error)


def sphere_constraint_leibniz(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """<u, D¹u> = -½ Σ_i H(uⁱ, uⁱ) for unit-length u."""
    errors = [relative_error(x.dot(_D(x)), -0.5 * leibniz_dot(x, x)) for x in (u, v)]
    return _pointwise(max(errors))


def waveform_difference_split(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """Difference of the wave-form right-hand sides against its four-line split."""
    du, dv = _D(u), _D(v)
    lines = [
        u * gradient_density(u) - v * gradient_density(v),
        v * dv.dot(dv) - u * du.dot(du),
        du * u.dot(du) - dv * v.dot(dv),
        u.cross(commutator_cross(u, du)) - v.cross(commutator_cross(v, dv)),
    ]
    rhs = lines[0] + lines[1] + lines[2] + lines[3]
    return _pointwise(relative_error(waveform_rhs(u) - waveform_rhs(v), rhs))


def _componentwise(build: Callable[[int], ScalarField]) -> VectorField3:
    return VectorField3.from_components([build(i) for i in range(3)])


def sphere_difference_splits(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """The algebraic steps that reorganize the difference equation for w = u - v."""
    w = u - v
    du, dv, dw = _D(u), _D(v), _D(w)
    parts = {}

    lhs = u * du.dot(du) - v * dv.dot(dv)
    rhs = w * du.dot(du) + v * dw.dot(du) + v * dv.dot(dw)
    parts["energy_split"] = relative_error(lhs, rhs)

    lhs = du * u.dot(du) - dv * v.dot(dv)
    rhs = -0.5 * (dw * leibniz_dot(u, u) + dv * leibniz_dot(w, u) + dv * leibniz_dot(v, w))
    parts["tangential_split"] = relative_error(lhs, rhs)

    lhs = u.cross(commutator_cross(u, du)) - v.cross(commutator_cross(v, dv))
    rhs = w.cross(commutator_cross(u, du)) + v.cross(commutator_cross(w, du)) + v.cross(commutator_cross(v, dw))
    parts["commutator_split"] = relative_error(lhs, rhs)

    lhs = v.cross(commutator_cross(w, du))
    rhs = v.cross(leibniz_cross(w, du)) + v.cross(dw.cross(du))
    parts["commutator_exchange"] = relative_error(lhs, rhs)

    lhs = hwm_rhs(u) - hwm_rhs(v)
    rhs = w.cross(du) + v.cross(dw)
    parts["time_derivative_split"] = relative_error(lhs, rhs)

    vs, dvs, dws = v.components(), dv.components(), dw.components()
    lhs = v.cross(commutator_cross(v, dw))

    def constraint_component(i):
        total = ScalarField.zeros(u.grid)
        for j in range(3):
            total = total + vs[j] * dvs[i] * dws[j] - vs[j] * dvs[j] * dws[i]
            total = total + vs[j] * leibniz(vs[i], dws[j], 1.0) - vs[j] * leibniz(vs[j], dws[i], 1.0)
        return total

    parts["constraint_commutator_split"] = relative_error(lhs, _componentwise(constraint_component))

    us, dus, ws = u.components(), du.components(), w.components()
    u_du = u.dot(du)

    def lhs_component(i):
        total = ScalarField.zeros(u.grid)
        for j in range(3):
            total = total + us[j] * leibniz(ws[i], dus[j], 1.0)
        return total

    def rhs_component(i):
        total = leibniz(ws[i], u_du, 1.0)
        for j in range(3):
            total = total - dus[j] * leibniz(ws[i], us[j], 1.0) - trilinear_commutator(ws[i], us[j], dus[j])
        return total

    parts["trilinear_exchange"] = relative_error(_componentwise(lhs_component), _componentwise(rhs_component))
    return CheckResult(max(parts.values()), None, parts)


def determinant_cancellation_chain(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """∫ Σ_i (Σ_j vʲ H(vʲ, Γⁱ)) (v∧Γ)ⁱ = -½ ∫ Σ ε_{kℓm} Γᵏ Σ_j vʲ (H(vʲΓˡ, vᵐ) - vʲ H(Γˡ, vᵐ)), Γ = D¹(u - v)."""
    gamma = _D(u - v)
    vs, gs = v.components(), gamma.components()
    v_cross_g = v.cross(gamma).components()

    lhs = 0.0
    for i in range(3):
        a_i = ScalarField.zeros(u.grid)
        for j in range(3):
            a_i = a_i + vs[j] * leibniz(vs[j], gs[i], 1.0)
        lhs += (a_i * v_cross_g[i]).integral()

    rhs = 0.0
    for k, l, m, sign in _levi_civita():
        inner = ScalarField.zeros(u.grid)
        for j in range(3):
            inner = inner + vs[j] * (leibniz(vs[j] * gs[l], vs[m], 1.0) - vs[j] * leibniz(gs[l], vs[m], 1.0))
        rhs += sign * (gs[k] * inner).integral()
    rhs *= -0.5
    logger.debug("determinant chain integrals: %.6e vs %.6e", lhs, rhs)
    return CheckResult(None, relative_error(lhs, rhs), {})


def fractional_struwe_decomposition(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """v·D¹w = -½ w·D¹w - ½(D¹(u+v)·w + H((u+v)·, w)), w = u - v."""
    w, a = u - v, u + v
    dw = _D(w)
    rhs = -0.5 * w.dot(dw) - 0.5 * (_D(a).dot(w) + leibniz_dot(a, w))
    return _pointwise(relative_error(v.dot(dw), rhs))


def leibniz_exchange(u: SphereField, v: SphereField, rng: np.random.Generator) -> CheckResult:
    """H₁(a, D^σ b) = -H₁(D^σ a, b) + D^σ H₁(a, b) - H̃(a, b) on scalar components of the pair."""
    sigma = EXCHANGE_ORDER
    a, b = u.component(0), v.component(1)
    lhs = leibniz(a, fractional_laplacian(b, sigma), 1.0)
    # the double commutator symbol is symmetric in its two orders
    rhs = (
        -leibniz(fractional_laplacian(a, sigma), b, 1.0)
        + fractional_laplacian(leibniz(a, b, 1.0), sigma)
        - double_commutator(a, b, alpha=sigma, beta=1.0)
    )
    return _pointwise(relative_error(lhs, rhs))


IdentityCheck = Callable[[SphereField, SphereField, np.random.Generator], CheckResult]

# (a)-(j) are required; the suite fails when any of them is missing
REQUIRED_IDENTITIES: Dict[str, IdentityCheck] = {
    "triple_product_expansion": triple_product_expansion,
    "lagrange_cross_dot": lagrange_cross_dot,
    "determinant_triple_product": determinant_triple_product,
    "struwe_orthogonality": struwe_orthogonality,
    "discrete_difference_trick": discrete_difference_trick,
    "sphere_constraint_leibniz": sphere_constraint_leibniz,
    "waveform_difference_split": waveform_difference_split,
    "sphere_difference_splits": sphere_difference_splits,
    "determinant_cancellation_chain": determinant_cancellation_chain,
    "fractional_struwe_decomposition": fractional_struwe_decomposition,
}

EXTRA_IDENTITIES: Dict[str, IdentityCheck] = {
    "leibniz_exchange": leibniz_exchange,
}

ALL_IDENTITIES: Dict[str, IdentityCheck] = {**REQUIRED_IDENTITIES, **EXTRA_IDENTITIES}


def check_pair(u: SphereField, v: SphereField, seed: int, names: Optional[Iterable[str]] = None) -> Dict[str, CheckResult]:
    names = list(ALL_IDENTITIES) if names is None else list(names)
    unknown = [name for name in names if name not in ALL_IDENTITIES]
    if unknown:
        raise ConfigError(f"unknown identities: {', '.join(unknown)}")
    results = {}
    for name in names:
        rng = np.random.default_rng([seed, len(name)])
        results[name] = ALL_IDENTITIES[name](u, v, rng)
    return results


def _worst(values: List[Optional[float]]) -> Optional[float]:
    present = [x for x in values if x is not None]
    return max(present) if present else None


def run_identity_suite(
    grid: TorusGrid,
    seeds: Iterable[int],
    band: int = 3,
    pointwise_tol: float = POINTWISE_TOL,
    integral_tol: float = INTEGRAL_TOL,
    workers: int = WORKERS,
    names: Optional[Iterable[str]] = None,
) -> List[IdentityReport]:
    """Evaluate every identity on one random sphere pair per seed and keep the worst error."""
    seeds = list(seeds)
    if not seeds:
        raise ConfigError("identity suite needs at least one seed")
    names = list(ALL_IDENTITIES) if names is None else list(names)

    def evaluate(seed: int) -> Dict[str, CheckResult]:
        u, v = random_sphere_pair(grid, seed, band=band)
        return check_pair(u, v, seed, names)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        per_seed = list(pool.map(evaluate, seeds))

    reports = []
    for name in names:
        results = [item[name] for item in per_seed]
        pointwise = _worst([r.pointwise for r in results])
        integral = _worst([r.integral for r in results])
        parts: Dict[str, float] = {}
        for r in results:
            for key, value in r.parts.items():
                parts[key] = max(parts.get(key, 0.0), value)
        if integral is not None:
            tolerance, passed = integral_tol, integral <= integral_tol
        else:
            tolerance, passed = pointwise_tol, pointwise <= pointwise_tol
        logger.info("identity %s: pointwise=%s integral=%s passed=%s", name, pointwise, integral, passed)
        reports.append(
            IdentityReport(
                identity=name,
                max_pointwise_error=pointwise,
                integral_error=integral,
                tolerance=tolerance,
                samples=len(seeds),
                passed=passed,
                parts=parts,
            )
        )
    return reports


def suite_passed(reports: List[IdentityReport]) -> bool:
    """True only if every required identity was evaluated and all reports pass."""
    seen = {r.identity for r in reports}
    missing = [name for name in REQUIRED_IDENTITIES if name not in seen]
    if missing:
        logger.error("identity suite skipped %s", ", ".join(missing))
        return False
    return all(r.passed for r in reports)
