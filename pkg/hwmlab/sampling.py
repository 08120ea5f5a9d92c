"""
Seeded sample families: band-limited fields, sphere-valued fields and bumps.

Band-limited samples are defined by integer wave vectors |m|_inf <= band,
independent of the grid resolution, so the same continuum field can be
evaluated on refined grids.
"""
import itertools
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.fft

from hwmlab.errors import ParameterOutOfRange
from hwmlab.spectral_core import ScalarField, SphereField, TorusGrid, VectorField3


def _check_band(grid: TorusGrid, band: int):
    if band < 1:
        raise ParameterOutOfRange(f"band must be >= 1, got {band}")
    if band >= min(grid.sizes) // 2:
        raise ParameterOutOfRange(f"band {band} is not resolved below Nyquist on {grid.sizes}")


def _coefficients(grid: TorusGrid, rng: np.random.Generator, band: int, decay: float, mean_zero: bool):
    """Complex coefficients on the integer cube [-band, band]^d, lexicographic order."""
    modes = np.array(list(itertools.product(range(-band, band + 1), repeat=grid.dim)), dtype=float)
    k = 2 * np.pi * modes / np.asarray(grid.lengths)
    magnitude = (1.0 + np.linalg.norm(k, axis=1)) ** (-decay)
    phases = rng.uniform(0.0, 2 * np.pi, size=len(modes))
    coeffs = magnitude * np.exp(1j * phases)
    if mean_zero:
        coeffs[np.all(modes == 0, axis=1)] = 0.0
    return modes.astype(int), coeffs


def _synthesize(grid: TorusGrid, modes: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    spectrum = np.zeros(grid.shape, dtype=complex)
    index = tuple((modes % np.asarray(grid.sizes)).T)
    np.add.at(spectrum, index, coeffs)
    return np.real(scipy.fft.ifftn(spectrum, norm="forward"))


def band_limited_field(
    grid: TorusGrid,
    seed: int,
    band: int = 4,
    decay: Optional[float] = None,
    mean_zero: bool = True,
    amplitude: float = 1.0,
) -> ScalarField:
    """Re sum_m c_m e^{ik.x} with |c_m| = (1+|k|)^{-decay} and random phases."""
    _check_band(grid, band)
    if decay is None:
        decay = (grid.dim + 2) / 2
    rng = np.random.default_rng(seed)
    modes, coeffs = _coefficients(grid, rng, band, decay, mean_zero)
    return ScalarField(grid, amplitude * _synthesize(grid, modes, coeffs))


def _vector_bound(grid: TorusGrid, seed: int, band: int, decay: Optional[float], mean_zero: bool):
    """Three band-limited components plus a continuum bound on their pointwise norm."""
    if decay is None:
        decay = (grid.dim + 2) / 2
    children = np.random.SeedSequence(seed).spawn(3)
    comps, bound = [], 0.0
    for child in children:
        rng = np.random.default_rng(child)
        modes, coeffs = _coefficients(grid, rng, band, decay, mean_zero)
        comps.append(_synthesize(grid, modes, coeffs))
        bound += np.sum(np.abs(coeffs)) ** 2
    return np.stack(comps), np.sqrt(bound)


def band_limited_vector(
    grid: TorusGrid,
    seed: int,
    band: int = 4,
    decay: Optional[float] = None,
    mean_zero: bool = True,
    amplitude: float = 1.0,
) -> VectorField3:
    _check_band(grid, band)
    values, _ = _vector_bound(grid, seed, band, decay, mean_zero)
    return VectorField3(grid, amplitude * values)


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_sphere_field(
    grid: TorusGrid,
    seed: int,
    band: int = 3,
    amplitude: float = 0.5,
    pole: Optional[Sequence[float]] = None,
) -> SphereField:
    """Normalization of Q + P with sup |P| <= amplitude <= 1/2 over the continuum."""
    if not 0 < amplitude <= 0.5:
        raise ParameterOutOfRange(f"perturbation amplitude must be in (0, 1/2], got {amplitude}")
    _check_band(grid, band)
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[0])
    q = random_unit_vector(rng) if pole is None else np.asarray(pole, float) / np.linalg.norm(pole)
    values, bound = _vector_bound(grid, seed + 7919, band, None, True)
    perturbation = values * (amplitude / bound)
    return SphereField.normalize(VectorField3(grid, q.reshape((3,) + (1,) * grid.dim) + perturbation))


def rodrigues(u: np.ndarray, axis: np.ndarray, angle: np.ndarray) -> np.ndarray:
    """Rotate u by angle about the unit axis, pointwise; arrays have a leading component axis."""
    cos, sin = np.cos(angle), np.sin(angle)
    n_dot_u = np.einsum("i...,i...->...", axis, u)
    return u * cos + np.cross(axis, u, axis=0) * sin + axis * (n_dot_u * (1.0 - cos))


def rotate_pointwise(u: SphereField, axis, angle) -> SphereField:
    """Rotate u(x) about axis(x) by angle(x); axis may be a constant 3-vector or a field."""
    grid = u.grid
    if isinstance(axis, VectorField3):
        n = axis.values / np.sqrt(np.sum(axis.values ** 2, axis=0))[None]
    else:
        n = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
        n = np.broadcast_to(n.reshape((3,) + (1,) * grid.dim), (3,) + grid.shape)
    theta = angle.values if isinstance(angle, ScalarField) else np.asarray(angle, dtype=float)
    return SphereField(grid, rodrigues(u.values, n, theta))


def random_sphere_pair(
    grid: TorusGrid,
    seed: int,
    band: int = 3,
    max_angle: float = 0.5,
) -> Tuple[SphereField, SphereField]:
    """u random on the sphere and v = u rotated pointwise by a smooth angle about a smooth axis."""
    u = random_sphere_field(grid, seed, band=band)
    axis = random_sphere_field(grid, seed + 104729, band=band)
    angle_values, bound = _vector_bound(grid, seed + 1299709, band, None, False)
    angle = ScalarField(grid, angle_values[0] * (max_angle / bound))
    return u, rotate_pointwise(u, axis, angle)


def bump_profile(grid: TorusGrid, center: Optional[Sequence[float]] = None, radius: float = 1.0) -> ScalarField:
    """exp(-1/(1-r^2)) with r = |x - center| / radius, periodic minimum image."""
    if center is None:
        center = [length / 2 for length in grid.lengths]
    r2 = np.zeros(grid.shape)
    for x, c, length in zip(grid.coordinates(), center, grid.lengths):
        dx = (x - c + length / 2) % length - length / 2
        r2 = r2 + (dx / radius) ** 2
    inside = r2 < 1.0
    values = np.zeros(grid.shape)
    values[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return ScalarField(grid, values)
