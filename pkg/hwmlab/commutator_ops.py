"""
Leibniz-rule commutators of fractional derivatives and their kernel oracles.

H_{D^s}(f, g) = D^s(fg) - f D^s g - (D^s f) g is computed spectrally and is
authoritative. The singular-integral representations on the line are only
used as cross-checks: they are evaluated on the periodic grid with the
periodized kernel sum_n |h + nL|^{-(1+s)} and their constant is fitted.
"""
import logging
import math
from enum import Enum
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.fft
import scipy.special
from pydantic import BaseModel, ConfigDict, Field as PydanticField

from hwmlab.errors import ParameterOutOfRange, SupportTooWide, UnsupportedDimension
from hwmlab.field_norms import lorentz_norm, lp_norm, LorentzParams, ratio
from hwmlab.spectral_core import (
    ScalarField,
    VectorField3,
    fractional_laplacian,
    gradient,
    laplacian,
    same_grid,
)

logger = logging.getLogger(__name__)

SUPPORT_THRESHOLD = 1e-14


def leibniz(f: ScalarField, g: ScalarField, s: float) -> ScalarField:
    """H_{D^s}(f, g); symmetric and bilinear."""
    if not 0 < s < 2:
        raise ParameterOutOfRange(f"Leibniz operator order must lie in (0, 2), got {s}")
    same_grid(f, g)
    return fractional_laplacian(f * g, s) - f * fractional_laplacian(g, s) - fractional_laplacian(f, s) * g


def leibniz_dot(a: VectorField3, b: VectorField3, s: float = 1.0) -> ScalarField:
    """H(a·, b) = sum_i H(a^i, b^i)."""
    terms = [leibniz(ai, bi, s) for ai, bi in zip(a.components(), b.components())]
    return terms[0] + terms[1] + terms[2]


def leibniz_cross(a: VectorField3, b: VectorField3, s: float = 1.0) -> VectorField3:
    """H(a∧, b) = D^s(a∧b) - a∧D^s b - D^s a∧b."""
    return (
        fractional_laplacian(a.cross(b), s)
        - a.cross(fractional_laplacian(b, s))
        - fractional_laplacian(a, s).cross(b)
    )


def commutator_cross(a: VectorField3, b: VectorField3, s: float = 1.0) -> VectorField3:
    """[D^s, a∧](b) = D^s(a∧b) - a∧D^s b."""
    return fractional_laplacian(a.cross(b), s) - a.cross(fractional_laplacian(b, s))


def adjoint_leibniz(f: ScalarField, g: ScalarField, sigma: float) -> ScalarField:
    """H*(f, g) = f D^σ g - (D^σ f) g - D^σ(fg), so that ∫ H*(f,g) h = ∫ g H(f,h)."""
    same_grid(f, g)
    return f * fractional_laplacian(g, sigma) - fractional_laplacian(f, sigma) * g - fractional_laplacian(f * g, sigma)


def double_commutator(f: ScalarField, g: ScalarField, alpha: float, beta: float) -> ScalarField:
    """D^β H_α(f,g) - H_α(D^β f, g) - H_α(f, D^β g)."""
    for name, value in (("alpha", alpha), ("beta", beta)):
        if not 0 < value <= 1:
            raise ParameterOutOfRange(f"double commutator needs {name} in (0, 1], got {value}")
    return (
        fractional_laplacian(leibniz(f, g, alpha), beta)
        - leibniz(fractional_laplacian(f, beta), g, alpha)
        - leibniz(f, fractional_laplacian(g, beta), alpha)
    )


def trilinear_commutator(a: ScalarField, b: ScalarField, c: ScalarField, s: float = 1.0) -> ScalarField:
    """Spectral form of the three-difference kernel quantity.

    D(abc) - aD(bc) - bD(ac) - cD(ab) + ab Dc + ac Db + bc Da, which equals
    κ ∫ (a(x)-a(y))(b(x)-b(y))(c(x)-c(y)) K(x-y) dy when D f = κ ∫ (f(x)-f(y)) K.
    """
    same_grid(a, b, c)
    D = lambda f: fractional_laplacian(f, s)
    return (
        D(a * b * c)
        - a * D(b * c)
        - b * D(a * c)
        - c * D(a * b)
        + a * b * D(c)
        + a * c * D(b)
        + b * c * D(a)
    )


def _mode_vectors(grid, spectrum: np.ndarray, rel_tol: float = 1e-12):
    """Integer wave vectors and coefficients of the nonzero modes of a full FFT."""
    cutoff = rel_tol * np.max(np.abs(spectrum)) if spectrum.size else 0.0
    index = np.argwhere(np.abs(spectrum) > cutoff)
    sizes = np.asarray(grid.sizes)
    modes = np.where(index >= sizes // 2, index - sizes, index)
    return modes, spectrum[tuple(index.T)]


def double_commutator_symbol_oracle(
    f: ScalarField, g: ScalarField, alpha: float, beta: float, max_pairs: int = 1_000_000
) -> ScalarField:
    """H̃ by direct evaluation of the bilinear symbol over all pairs of nonzero modes.

    For input modes η, ζ with ξ = η + ζ the symbol is
    (|ξ|^β - |η|^β - |ζ|^β)(|ξ|^α - |η|^α - |ζ|^α).
    """
    grid = same_grid(f, g)
    f_modes, f_coef = _mode_vectors(grid, scipy.fft.fftn(f.values, norm="forward"))
    g_modes, g_coef = _mode_vectors(grid, scipy.fft.fftn(g.values, norm="forward"))
    if len(f_modes) * len(g_modes) > max_pairs:
        raise ParameterOutOfRange(f"{len(f_modes)} x {len(g_modes)} mode pairs exceed max_pairs={max_pairs}")
    scale = 2 * np.pi / np.asarray(grid.lengths)
    sizes = np.asarray(grid.sizes)
    out = np.zeros(grid.shape, dtype=complex)

    def power(m, s):
        k = np.linalg.norm(m * scale, axis=-1)
        return np.where(k > 0, np.abs(k) ** s, 0.0)

    if len(f_modes) and len(g_modes):
        eta = f_modes[:, None, :]
        zeta = g_modes[None, :, :]
        xi = eta + zeta
        if np.any(xi < -(sizes // 2)) or np.any(xi >= sizes // 2):
            raise ParameterOutOfRange("product of the inputs aliases on this grid")
        symbol = (power(xi, beta) - power(eta, beta) - power(zeta, beta)) * (
            power(xi, alpha) - power(eta, alpha) - power(zeta, alpha)
        )
        contrib = symbol * f_coef[:, None] * g_coef[None, :]
        index = tuple(np.moveaxis(xi % sizes, -1, 0).reshape(grid.dim, -1))
        np.add.at(out, index, contrib.ravel())
    return ScalarField(grid, np.real(scipy.fft.ifftn(out, norm="forward")))


class QuadratureMode(str, Enum):
    SYMMETRIC_SECOND_DIFFERENCE = "symmetric_second_difference"
    FIRST_DIFFERENCE = "first_difference"


class KernelQuadratureConfig(BaseModel):
    """Midpoint quadrature of singular difference kernels on a 1-d periodic grid."""

    model_config = ConfigDict(frozen=True)

    mode: QuadratureMode = QuadratureMode.SYMMETRIC_SECOND_DIFFERENCE
    truncation_radius: float = PydanticField(0.5, gt=0.0, le=0.5)  # fraction of the box length
    inner_cutoff: int = PydanticField(1, ge=1)  # offsets below this many cells are dropped
    rule: str = PydanticField("midpoint", pattern="^midpoint$")
    singular_correction: bool = True


class OracleFit(NamedTuple):
    field: ScalarField
    fitted_c: float
    residual: float


def periodized_kernel(offsets: np.ndarray, length: float, exponent: float) -> np.ndarray:
    """sum_n |h + nL|^{-exponent} for h in (0, L), via the Hurwitz zeta function."""
    h = np.asarray(offsets, dtype=float) / length
    return length ** (-exponent) * (scipy.special.zeta(exponent, h) + scipy.special.zeta(exponent, 1.0 - h))


def _require_line(f: ScalarField, what: str):
    if f.grid.dim != 1:
        raise UnsupportedDimension(f"{what} is only implemented for d = 1, got d = {f.grid.dim}")


def _offsets(n: int, cfg: KernelQuadratureConfig):
    k = np.arange(1, n)
    nearest = np.minimum(k, n - k)
    keep = (nearest >= cfg.inner_cutoff) & (nearest <= cfg.truncation_radius * n)
    return k[keep]


def _check_order(s: float, mode: QuadratureMode):
    if mode == QuadratureMode.FIRST_DIFFERENCE and not 0 < s < 1:
        raise ParameterOutOfRange(f"first-difference quadrature needs s in (0, 1), got {s}")
    if not 0 < s < 2:
        raise ParameterOutOfRange(f"second-difference quadrature needs s in (0, 2), got {s}")


def _potential_sum(values: np.ndarray, offsets: np.ndarray, kernel: np.ndarray, mode: QuadratureMode) -> np.ndarray:
    """Σ_k w_k (v(x) - v(x - kΔx)), or its symmetric second-difference form."""
    out = np.zeros_like(values)
    for k, weight in zip(offsets, kernel):
        if mode == QuadratureMode.FIRST_DIFFERENCE:
            out += (values - np.roll(values, k)) * weight
        else:
            out += 0.5 * (2 * values - np.roll(values, k) - np.roll(values, -k)) * weight
    return out


def _small_offset_weight(s: float, cutoff: int) -> float:
    """Leading generalized Euler-Maclaurin weight for a one-sided h^{1-s} singularity."""
    gamma = 1.0 - s
    riemann = scipy.special.zetac(-gamma) + 1.0
    return float(sum(k ** gamma for k in range(1, cutoff)) - riemann)


def support_diameter(*fields: ScalarField) -> float:
    """Length of the shortest periodic arc holding every point where some field is non-negligible."""
    grid = fields[0].grid
    scale = max(f.max_abs() for f in fields)
    if scale == 0:
        return 0.0
    mask = np.zeros(grid.shape, dtype=bool)
    for f in fields:
        mask |= np.abs(f.values) > SUPPORT_THRESHOLD * scale
    idx = np.flatnonzero(mask)
    n = grid.sizes[0]
    gaps = np.diff(np.concatenate((idx, [idx[0] + n])))
    return float((n - np.max(gaps)) * grid.spacing[0])


def _fit(raw: np.ndarray, target: ScalarField) -> OracleFit:
    grid = target.grid
    denom = float(np.dot(raw, raw))
    if denom == 0:
        return OracleFit(ScalarField.zeros(grid), math.nan, 0.0 if target.max_abs() == 0 else 1.0)
    c = float(np.dot(raw, target.values) / denom)
    fitted = c * raw
    target_norm = float(np.linalg.norm(target.values))
    residual = float(np.linalg.norm(fitted - target.values) / (target_norm if target_norm > 0 else 1.0))
    return OracleFit(ScalarField(grid, fitted), c, residual)


def leibniz_oracle(
    f: ScalarField, g: ScalarField, s: float, cfg: Optional[KernelQuadratureConfig] = None
) -> OracleFit:
    """Fit c in H_{D^s}(f,g)(x) = c ∫ (f(x)-f(y))(g(x)-g(y)) |x-y|^{-1-s} dy.

    Inputs must be localized (support diameter <= L/8) so the periodic box
    emulates the line. Returns the scaled quadrature, the fitted constant and
    the relative L² residual against the spectral operator. A vanishing input
    skips the fit and reports c = nan.

    symmetric_second_difference sums the product of differences directly;
    first_difference assembles H from three single-difference potentials of
    fg, g and f, which changes the rounding but not the constant.
    """
    cfg = cfg or KernelQuadratureConfig()
    grid = same_grid(f, g)
    _require_line(f, "the Leibniz kernel oracle")
    _check_order(s, cfg.mode)
    if f.max_abs() == 0 or g.max_abs() == 0:
        return OracleFit(ScalarField.zeros(grid), math.nan, 0.0)
    length, n, dx = grid.lengths[0], grid.sizes[0], grid.spacing[0]
    diameter = support_diameter(f, g)
    if diameter > length / 8 + dx:
        raise SupportTooWide(f"support diameter {diameter:.4g} exceeds L/8 = {length / 8:.4g}")

    offsets = _offsets(n, cfg)
    kernel = periodized_kernel(offsets * dx, length, 1.0 + s)
    fv, gv = f.values, g.values
    if cfg.mode == QuadratureMode.FIRST_DIFFERENCE:
        raw = -(
            _potential_sum(fv * gv, offsets, kernel, cfg.mode)
            - fv * _potential_sum(gv, offsets, kernel, cfg.mode)
            - gv * _potential_sum(fv, offsets, kernel, cfg.mode)
        )
    else:
        raw = np.zeros(n)
        for k, weight in zip(offsets, kernel):
            raw += (fv - np.roll(fv, k)) * (gv - np.roll(gv, k)) * weight
    raw *= dx
    if cfg.singular_correction:
        df, dg = gradient(f)[0], gradient(g)[0]
        # each side behaves like f'g' h^{1-s} near the diagonal
        raw += 2.0 * df.values * dg.values * dx ** (2.0 - s) * _small_offset_weight(s, cfg.inner_cutoff)
    fit = _fit(raw, leibniz(f, g, s))
    logger.debug("Leibniz oracle s=%g N=%d: c=%.6g residual=%.3e", s, n, fit.fitted_c, fit.residual)
    return fit


def fractional_laplacian_oracle(
    f: ScalarField, s: float, cfg: Optional[KernelQuadratureConfig] = None
) -> OracleFit:
    """Fit c in D^s f(x) = c ∫ (f(x) - f(y)) |x-y|^{-1-s} dy on a 1-d grid.

    first_difference needs s in (0, 1); symmetric_second_difference takes s in (0, 2).
    """
    cfg = cfg or KernelQuadratureConfig()
    _require_line(f, "the fractional Laplacian oracle")
    grid = f.grid
    _check_order(s, cfg.mode)
    length, n, dx = grid.lengths[0], grid.sizes[0], grid.spacing[0]
    offsets = _offsets(n, cfg)
    kernel = periodized_kernel(offsets * dx, length, 1.0 + s)
    raw = _potential_sum(f.values, offsets, kernel, cfg.mode) * dx
    if cfg.singular_correction:
        # both sides behave like -f''/2 h^{1-s} near the diagonal
        raw += -laplacian(f).values * dx ** (2.0 - s) * _small_offset_weight(s, cfg.inner_cutoff)
    return _fit(raw, fractional_laplacian(f, s))


def _kernel_loop(grid, exponent: float, integrand) -> ScalarField:
    length, n, dx = grid.lengths[0], grid.sizes[0], grid.spacing[0]
    offsets = np.arange(1, n)
    kernel = periodized_kernel(offsets * dx, length, exponent)
    out = np.zeros(n)
    for k, weight in zip(offsets, kernel):
        out += integrand(k) * weight
    return ScalarField(grid, out * dx)


def pair_kernel_value(f: ScalarField, g: ScalarField, s: float) -> ScalarField:
    """∫ |f(x)-f(y)| |g(x)-g(y)| |x-y|^{-1-s} dy on a 1-d grid."""
    grid = same_grid(f, g)
    _require_line(f, "the two-factor kernel")
    fv, gv = f.values, g.values
    return _kernel_loop(grid, 1.0 + s, lambda k: np.abs(fv - np.roll(fv, k)) * np.abs(gv - np.roll(gv, k)))


class TripleVariant(str, Enum):
    THREE_DIFFERENCES = "three_differences"
    TWO_DIFFERENCES_TIMES_H = "two_differences_times_h"


def triple_kernel_value(
    f: ScalarField, g: ScalarField, h: ScalarField, variant: TripleVariant = TripleVariant.THREE_DIFFERENCES
) -> ScalarField:
    """∫ |Δf||Δg||Δh| |x-y|^{-2} dy, or with |h(y)| in place of |Δh|, on a 1-d grid."""
    grid = same_grid(f, g, h)
    _require_line(f, "the three-term kernel")
    variant = TripleVariant(variant)
    fv, gv, hv = f.values, g.values, h.values

    def integrand(k):
        base = np.abs(fv - np.roll(fv, k)) * np.abs(gv - np.roll(gv, k))
        if variant == TripleVariant.THREE_DIFFERENCES:
            return base * np.abs(hv - np.roll(hv, k))
        return base * np.abs(np.roll(hv, k))

    return _kernel_loop(grid, 2.0, integrand)


def _holder(p: float, *ps: float) -> None:
    if not math.isclose(1.0 / p, sum(1.0 / q for q in ps), rel_tol=1e-12):
        raise ParameterOutOfRange(f"exponents must satisfy 1/p = sum 1/p_i, got p={p}, p_i={ps}")


def _open_unit(name: str, value: float, upper: float = 1.0, closed: bool = False):
    ok = 0 < value <= upper if closed else 0 < value < upper
    if not ok:
        bracket = "]" if closed else ")"
        raise ParameterOutOfRange(f"{name} must lie in (0, {upper:g}{bracket}, got {value}")


def leibniz_split_quotient(
    f: ScalarField, g: ScalarField, alpha: float, sigma: float, p1: float, p2: float
) -> float:
    """||H_α(f,g)||_p / (||D^σ f||_{p1} ||D^{α-σ} g||_{p2})."""
    _open_unit("alpha", alpha, closed=True)
    _open_unit("sigma", sigma, upper=alpha)
    if not (1 < p1 < math.inf and 1 < p2 < math.inf):
        raise ParameterOutOfRange(f"p1, p2 must lie in (1, inf), got {p1}, {p2}")
    p = 1.0 / (1.0 / p1 + 1.0 / p2)
    if p <= 1:
        raise ParameterOutOfRange(f"1/p1 + 1/p2 must be < 1, got p = {p}")
    lhs = lp_norm(leibniz(f, g, alpha), p)
    rhs = lp_norm(fractional_laplacian(f, sigma), p1) * lp_norm(fractional_laplacian(g, alpha - sigma), p2)
    return ratio(lhs, rhs)


def _need_dim(f: ScalarField, minimum: int, what: str):
    if f.grid.dim < minimum:
        raise ParameterOutOfRange(f"{what} needs d >= {minimum}, got d = {f.grid.dim}")


def leibniz_energy_quotient(f: ScalarField, g: ScalarField) -> float:
    """||H_1(f,g)||_{2d/(d-1)} / (||D f||_2 ||D g||_{2d})."""
    _need_dim(f, 2, "the energy-space Leibniz bound")
    d = f.grid.dim
    lhs = lp_norm(leibniz(f, g, 1.0), 2 * d / (d - 1))
    rhs = lp_norm(fractional_laplacian(f, 1.0), 2) * lp_norm(fractional_laplacian(g, 1.0), 2 * d)
    return ratio(lhs, rhs)


def differentiated_leibniz_quotient(f: ScalarField, g: ScalarField) -> float:
    """||D H_1(f,g)||_d / (||D f||_{2d} ||D g||_{2d})."""
    _need_dim(f, 2, "the differentiated Leibniz bound")
    d = f.grid.dim
    lhs = lp_norm(fractional_laplacian(leibniz(f, g, 1.0), 1.0), d)
    rhs = lp_norm(fractional_laplacian(f, 1.0), 2 * d) * lp_norm(fractional_laplacian(g, 1.0), 2 * d)
    return ratio(lhs, rhs)


def leibniz_sup_quotient(f: ScalarField, g: ScalarField) -> float:
    """||H_1(f,g)||_∞ / (||D f||_{(2d,2)} ||D g||_{(2d,2)})."""
    _need_dim(f, 2, "the L-infinity Leibniz bound")
    lorentz = LorentzParams(p=2 * f.grid.dim, q=2)
    lhs = lp_norm(leibniz(f, g, 1.0), math.inf)
    rhs = lorentz_norm(fractional_laplacian(f, 1.0), lorentz) * lorentz_norm(fractional_laplacian(g, 1.0), lorentz)
    return ratio(lhs, rhs)


def differentiated_order_quotient(
    f: ScalarField, g: ScalarField, alpha: float, beta: float, gamma: float, p1: float, p2: float
) -> float:
    """||D^α H_β(f,g)||_p / (||D^γ f||_{p1} ||D^{α+β-γ} g||_{p2})."""
    for name, value in (("alpha", alpha), ("beta", beta), ("gamma", gamma), ("alpha+beta-gamma", alpha + beta - gamma)):
        _open_unit(name, value)
    p = 1.0 / (1.0 / p1 + 1.0 / p2)
    if not p > 1:
        raise ParameterOutOfRange(f"1/p1 + 1/p2 must be < 1, got p = {p}")
    lhs = lp_norm(fractional_laplacian(leibniz(f, g, beta), alpha), p)
    rhs = lp_norm(fractional_laplacian(f, gamma), p1) * lp_norm(fractional_laplacian(g, alpha + beta - gamma), p2)
    return ratio(lhs, rhs)


def double_commutator_quotient(
    f: ScalarField, g: ScalarField, alpha: float, beta: float, gamma: float, p1: float, p2: float
) -> float:
    """||H̃(f,g)||_p / (||D^γ f||_{p1} ||D^{α+β-γ} g||_{p2}) with γ in (0, α+β)."""
    _open_unit("gamma", gamma, upper=alpha + beta)
    p = 1.0 / (1.0 / p1 + 1.0 / p2)
    if not p > 1:
        raise ParameterOutOfRange(f"1/p1 + 1/p2 must be < 1, got p = {p}")
    lhs = lp_norm(double_commutator(f, g, alpha, beta), p)
    rhs = lp_norm(fractional_laplacian(f, gamma), p1) * lp_norm(fractional_laplacian(g, alpha + beta - gamma), p2)
    return ratio(lhs, rhs)


def pair_kernel_quotient(
    f: ScalarField, g: ScalarField, s: float, alphas: Tuple[float, float], ps: Tuple[float, float]
) -> float:
    """||∫|Δf||Δg| |x-y|^{-1-s}||_p / (||D^{α1} f||_{p1} ||D^{α2} g||_{p2})."""
    _open_unit("s", s, closed=True)
    a1, a2 = alphas
    _open_unit("alpha_1", a1, upper=s)
    _open_unit("alpha_2", a2, upper=s)
    if not math.isclose(a1 + a2, s, rel_tol=1e-12):
        raise ParameterOutOfRange(f"alpha_1 + alpha_2 must equal s={s}, got {a1 + a2}")
    p1, p2 = ps
    if not (p1 >= 2 and p2 >= 2):
        raise ParameterOutOfRange(f"two-factor kernel bound needs p_i >= 2, got {ps}")
    p = 1.0 / (1.0 / p1 + 1.0 / p2)
    if not p > 1:
        raise ParameterOutOfRange(f"1/p1 + 1/p2 must be < 1, got p = {p}")
    lhs = lp_norm(pair_kernel_value(f, g, s), p)
    rhs = lp_norm(fractional_laplacian(f, a1), p1) * lp_norm(fractional_laplacian(g, a2), p2)
    return ratio(lhs, rhs)


def triple_kernel_quotient(
    f: ScalarField, g: ScalarField, h: ScalarField, alphas: Tuple[float, float, float], ps: Tuple[float, float, float]
) -> float:
    """||∫|Δf||Δg||Δh| |x-y|^{-d-1}||_p / prod ||D^{α_i} ·||_{p_i} with sum α_i = 1."""
    d = f.grid.dim
    for i, a in enumerate(alphas, start=1):
        _open_unit(f"alpha_{i}", a)
    if not math.isclose(sum(alphas), 1.0, rel_tol=1e-12):
        raise ParameterOutOfRange(f"three-term kernel bound needs sum alpha_i = 1, got {sum(alphas)}")
    p = 1.0 / sum(1.0 / q for q in ps)
    if not 1 < p < math.inf:
        raise ParameterOutOfRange(f"three-term kernel bound needs p in (1, inf), got {p}")
    for i, (a, q) in enumerate(zip(alphas, ps), start=1):
        if not (p < q < math.inf and 1.0 / q - a / d < 0.5):
            raise ParameterOutOfRange(f"p_{i}={q} violates p < p_i < inf and 1/p_i - alpha_i/d < 1/2")
    lhs = lp_norm(triple_kernel_value(f, g, h, TripleVariant.THREE_DIFFERENCES), p)
    rhs = 1.0
    for field, a, q in zip((f, g, h), alphas, ps):
        rhs *= lp_norm(fractional_laplacian(field, a), q)
    return ratio(lhs, rhs)


def triple_kernel_shifted_quotient(
    f: ScalarField, g: ScalarField, h: ScalarField, alphas: Tuple[float, float], ps: Tuple[float, float, float]
) -> float:
    """Variant with |h(y)| undifferenced: L² norm over ||D^{α1}f||_{p1} ||D^{α2}g||_{p2} ||h||_r,
    r = d p3 / (d + (α1+α2-1) p3), α1 + α2 > 1."""
    d = f.grid.dim
    a1, a2 = alphas
    _open_unit("alpha_1", a1)
    _open_unit("alpha_2", a2)
    excess = a1 + a2 - 1
    if excess <= 0:
        raise ParameterOutOfRange(f"shifted three-term bound needs alpha_1 + alpha_2 > 1, got {a1 + a2}")
    if d == 1 and not excess < d / 2:
        raise ParameterOutOfRange("for d = 1 the shifted bound needs alpha_1 + alpha_2 - 1 < 1/2")
    if not all(2 < q < math.inf for q in ps):
        raise ParameterOutOfRange(f"shifted three-term bound needs p_i in (2, inf), got {ps}")
    _holder(2.0, *ps)
    p3 = ps[2]
    r = d * p3 / (d + excess * p3)
    if not 1 < r < math.inf:
        raise ParameterOutOfRange(f"h exponent d p3 / (d + (alpha_1+alpha_2-1) p3) = {r} must lie in (1, inf)")
    lhs = lp_norm(triple_kernel_value(f, g, h, TripleVariant.TWO_DIFFERENCES_TIMES_H), 2.0)
    rhs = lp_norm(fractional_laplacian(f, a1), ps[0]) * lp_norm(fractional_laplacian(g, a2), ps[1]) * lp_norm(h, r)
    return ratio(lhs, rhs)
