"""
Free wave propagation, Duhamel forcing and the Strichartz quotient
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.fft

from hwmlab.config import FFT_WORKERS
from hwmlab.errors import ParameterOutOfRange
from hwmlab.field_norms import LorentzParams, lorentz_norm, lp_norm, ratio
from hwmlab.spectral_core import ScalarField, SpectralMultiplier, apply_multiplier, fractional_laplacian, same_grid

logger = logging.getLogger(__name__)

ALPHA_RANGE_NOTE = (
    "The stated admissible range alpha in (1/2, (d^2-4d+1)/(2(d-1))] is empty for d = 4 "
    "(upper end 1/6 < 1/2), while the estimate itself is derived at order "
    "1 + (d^2-4d+1)/(2(d-1)). alpha is therefore treated as a free parameter and "
    "quotients are reported over a sweep; no intended range is assumed."
)


def stated_alpha_upper(d: int) -> float:
    return (d * d - 4 * d + 1) / (2 * (d - 1))


@dataclass(frozen=True, eq=False)
class WaveState:
    position: ScalarField
    velocity: ScalarField
    time: float

    def __post_init__(self):
        same_grid(self.position, self.velocity)

    def energy(self) -> float:
        """||∇u||² + ||∂_t u||²."""
        grad = fractional_laplacian(self.position, 1.0)
        return grad.inner(grad) + self.velocity.inner(self.velocity)


def free_wave(f: ScalarField, g: ScalarField, t: float) -> WaveState:
    """Solution of u_tt = Δu with u(0) = f, u_t(0) = g, evaluated at time t."""
    same_grid(f, g)
    cos = SpectralMultiplier.wave_cos(t)
    position = apply_multiplier(f, cos) + apply_multiplier(g, SpectralMultiplier.wave_sinc(t))
    velocity = apply_multiplier(f, SpectralMultiplier.wave_cos_rate(t)) + apply_multiplier(g, cos)
    return WaveState(position, velocity, t)


def trapezoid_weights(s_grid: np.ndarray) -> np.ndarray:
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size == 1:
        return np.zeros(1)
    h = np.diff(s_grid)
    weights = np.zeros(s_grid.size)
    weights[:-1] += 0.5 * h
    weights[1:] += 0.5 * h
    return weights


def _check_uniform(s_grid: np.ndarray, t: float):
    if s_grid.ndim != 1 or s_grid.size < 2:
        raise ParameterOutOfRange("time grid needs at least two points")
    steps = np.diff(s_grid)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ParameterOutOfRange("time grid must be uniform")
    if abs(s_grid[0]) > 1e-12 or not math.isclose(s_grid[-1], t, rel_tol=1e-9, abs_tol=1e-12):
        raise ParameterOutOfRange(f"time grid must cover [0, {t}]")


def duhamel(
    f: ScalarField,
    g: ScalarField,
    forcing: Sequence[ScalarField],
    s_grid: Sequence[float],
    t: Optional[float] = None,
) -> WaveState:
    """u_tt - Δu = h: free part plus trapezoid quadrature of free_wave(0, h(s), t - s)."""
    s_grid = np.asarray(s_grid, dtype=float)
    t = float(s_grid[-1]) if t is None else t
    _check_uniform(s_grid, t)
    if len(forcing) != s_grid.size:
        raise ParameterOutOfRange(f"{len(forcing)} forcing samples for {s_grid.size} grid times")
    state = free_wave(f, g, t)
    zero = ScalarField.zeros(f.grid)
    position, velocity = state.position, state.velocity
    for weight, s, h in zip(trapezoid_weights(s_grid), s_grid, forcing):
        if weight == 0:
            continue
        kick = free_wave(zero, h, t - s)
        position = position + weight * kick.position
        velocity = velocity + weight * kick.velocity
    return WaveState(position, velocity, t)


def _spectral_history(f: ScalarField, g: ScalarField, forcing: Sequence[ScalarField], times: np.ndarray):
    """û(t_n) for every grid time, accumulating the Duhamel sum in Fourier space."""
    grid = f.grid
    kmag = grid.wavenumber_magnitude()
    f_hat = scipy.fft.rfftn(f.values, workers=FFT_WORKERS)
    g_hat = scipy.fft.rfftn(g.values, workers=FFT_WORKERS)
    h_hat = [scipy.fft.rfftn(h.values, workers=FFT_WORKERS) for h in forcing]

    def sinc(t):
        return SpectralMultiplier.wave_sinc(t).symbol(grid)

    for n, t in enumerate(times):
        u_hat = np.cos(t * kmag) * f_hat + sinc(t) * g_hat
        if n > 0:
            weights = trapezoid_weights(times[: n + 1])
            for weight, s, hh in zip(weights, times[: n + 1], h_hat[: n + 1]):
                u_hat = u_hat + weight * sinc(t - s) * hh
        yield scipy.fft.irfftn(u_hat, s=grid.shape, workers=FFT_WORKERS)


def strichartz_quotient(
    f: ScalarField,
    g: ScalarField,
    h: Optional[Sequence[ScalarField]],
    alpha: float,
    T: float,
    n_times: int = 21,
) -> float:
    """||D^α u||_{L²_t L^{(2d/(2α-1),2)}_x} / (||D^{d/2} f||₂ + ||D^{d/2-1} g||₂ + ||D^{d/2-1} h||_{L¹_t L²_x}).

    Space norm per snapshot first, then trapezoid in time. h is sampled on
    linspace(0, T, n_times); None means no forcing.
    """
    grid = same_grid(f, g)
    d = grid.dim
    if d < 4:
        raise ParameterOutOfRange(f"the Strichartz quotient needs d >= 4, got d = {d}")
    if not 0.5 < alpha < d + 0.5:
        raise ParameterOutOfRange(f"alpha must lie in (1/2, d + 1/2), got {alpha}")
    if not T > 0:
        raise ParameterOutOfRange(f"T must be positive, got {T}")
    times = np.linspace(0.0, T, n_times)
    forcing = [ScalarField.zeros(grid)] * n_times if h is None else list(h)
    if len(forcing) != n_times:
        raise ParameterOutOfRange(f"{len(forcing)} forcing samples for {n_times} grid times")

    lorentz = LorentzParams(p=2 * d / (2 * alpha - 1), q=2)
    space = []
    for values in _spectral_history(f, g, forcing, times):
        space.append(lorentz_norm(fractional_laplacian(ScalarField(grid, values), alpha), lorentz))
    weights = trapezoid_weights(times)
    lhs = math.sqrt(float(np.dot(weights, np.square(space))))

    forcing_norms = [lp_norm(fractional_laplacian(hh, d / 2 - 1), 2) for hh in forcing]
    rhs = (
        lp_norm(fractional_laplacian(f, d / 2), 2)
        + lp_norm(fractional_laplacian(g, d / 2 - 1), 2)
        + float(np.dot(weights, forcing_norms))
    )
    return ratio(lhs, rhs)
