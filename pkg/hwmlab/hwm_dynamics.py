"""
Half-wave maps flow u_t = u ∧ D¹u on the torus, its wave-form right-hand side,
the difference energy of two solutions and the Grönwall experiment.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from hwmlab.config import CFL_LIMIT, DEFAULT_ALPHA, ENERGY_FLOOR
from hwmlab.errors import DegenerateEnergy, ParameterOutOfRange, StepUnstable
from hwmlab.field_norms import LorentzParams, lorentz_norm, lp_norm
from hwmlab.sampling import rodrigues, rotate_pointwise
from hwmlab.spectral_core import (
    ScalarField,
    SphereField,
    VectorField3,
    fractional_laplacian,
    gradient,
    gradient_norm_squared,
    laplacian,
)

logger = logging.getLogger(__name__)


class Method(str, Enum):
    LIE_MIDPOINT = "lie_midpoint"
    RK4_PROJECT = "rk4_project"


def hwm_rhs(u: VectorField3) -> VectorField3:
    """u ∧ D¹u."""
    return u.cross(fractional_laplacian(u, 1.0))


def _rotate_by_rate(u: np.ndarray, omega: np.ndarray, dt: float) -> np.ndarray:
    """Exact flow of u_t = u ∧ ω for frozen ω: rotation about ω̂ by angle -|ω| dt."""
    rate = np.sqrt(np.sum(omega ** 2, axis=0))
    safe = np.where(rate > 0, rate, 1.0)
    e_z = np.array([0.0, 0.0, 1.0]).reshape((3,) + (1,) * (omega.ndim - 1))
    axis = np.where(rate > 0, omega / safe[None], e_z)
    return rodrigues(u, axis, -rate * dt)


def cfl_number(u: VectorField3, dt: float) -> float:
    return dt * float(np.max(fractional_laplacian(u, 1.0).norm().values))


def step(u: SphereField, dt: float, method: Union[Method, str] = Method.LIE_MIDPOINT) -> SphereField:
    if not dt > 0:
        raise ParameterOutOfRange(f"time step must be positive, got {dt}")
    method = Method(method)
    if method == Method.LIE_MIDPOINT:
        omega = fractional_laplacian(u, 1.0).values
        half = _rotate_by_rate(u.values, omega, 0.5 * dt)
        omega_half = fractional_laplacian(VectorField3(u.grid, half), 1.0).values
        values = _rotate_by_rate(u.values, omega_half, dt)
    else:
        k1 = hwm_rhs(u)
        k2 = hwm_rhs(u + 0.5 * dt * k1)
        k3 = hwm_rhs(u + 0.5 * dt * k2)
        k4 = hwm_rhs(u + dt * k3)
        values = (u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).values
        values = values / np.sqrt(np.sum(values ** 2, axis=0))[None]
    if not np.all(np.isfinite(values)):
        raise StepUnstable(f"{method.value} step with dt={dt} produced non-finite values")
    return SphereField(u.grid, values)


@dataclass(frozen=True, eq=False)
class HwmTrajectory:
    times: np.ndarray
    snapshots: List[SphereField]
    method: Method
    dt: float

    @property
    def final(self) -> SphereField:
        return self.snapshots[-1]

    def velocity(self, index: int) -> VectorField3:
        return hwm_rhs(self.snapshots[index])


def _step_count(T: float, dt: float) -> int:
    if not (dt > 0 and T >= 0):
        raise ParameterOutOfRange(f"need dt > 0 and T >= 0, got dt={dt}, T={T}")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(T, dt):
        raise ParameterOutOfRange(f"T={T} is not an integer multiple of dt={dt}")
    return n


def integrate(
    u0: SphereField,
    T: float,
    dt: float,
    method: Union[Method, str] = Method.LIE_MIDPOINT,
    record_every: int = 1,
) -> HwmTrajectory:
    method = Method(method)
    n_steps = _step_count(T, dt)
    cfl = cfl_number(u0, dt)
    if cfl > CFL_LIMIT:
        logger.warning("dt*max|D¹u| = %.3g exceeds %.3g; the step may be inaccurate", cfl, CFL_LIMIT)
    u = u0
    times, snapshots = [0.0], [u0]
    for n in range(1, n_steps + 1):
        u = step(u, dt, method)
        if n % record_every == 0 or n == n_steps:
            times.append(n * dt)
            snapshots.append(u)
    logger.debug("integrated %d %s steps of size %g", n_steps, method.value, dt)
    return HwmTrajectory(np.array(times), snapshots, method, dt)


def conserved_energy(u: VectorField3) -> float:
    """∫ <u, D¹u> dx."""
    return u.inner(fractional_laplacian(u, 1.0))


def total_spin(u: VectorField3) -> np.ndarray:
    return u.integral()


def gradient_density(u: VectorField3) -> ScalarField:
    """|∇u|² = sum over axes and components of (∂_j u^i)²."""
    total = np.zeros(u.grid.shape)
    for du in gradient(u):
        total += np.sum(du.values ** 2, axis=0)
    return ScalarField(u.grid, total)


def waveform_terms(u: VectorField3) -> Dict[str, VectorField3]:
    """The five summands of ∂_tt u - Δu for a half-wave map, by name."""
    du = fractional_laplacian(u, 1.0)
    minus_lap = -laplacian(u)
    return {
        "gradient_energy": u * gradient_density(u),
        "half_gradient_energy": -(u * du.dot(du)),
        "tangential_drift": du * u.dot(du),
        "commutator": u.cross(fractional_laplacian(u.cross(du), 1.0)),
        "laplacian_twist": -u.cross(u.cross(minus_lap)),
    }


def waveform_rhs(u: VectorField3) -> VectorField3:
    terms = list(waveform_terms(u).values())
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total


def waveform_residual(trajectory: HwmTrajectory, index: int) -> VectorField3:
    """δ²_t u / dt² - Δu - waveform_rhs(u) at an interior snapshot."""
    if not 0 < index < len(trajectory.snapshots) - 1:
        raise ParameterOutOfRange("residual needs an interior snapshot")
    t = trajectory.times
    h = t[index + 1] - t[index]
    if not math.isclose(h, t[index] - t[index - 1], rel_tol=1e-9):
        raise ParameterOutOfRange("snapshots around the index are not evenly spaced")
    prev, cur, nxt = (trajectory.snapshots[i] for i in (index - 1, index, index + 1))
    second = (nxt - 2.0 * cur + prev) / (h * h)
    return second - laplacian(cur) - waveform_rhs(cur)


class GradientReading(str, Enum):
    NABLA = "nabla"
    HALF_LAPLACIAN = "half_laplacian"


def pair_energy(
    u: VectorField3,
    v: VectorField3,
    du_dt: Optional[VectorField3] = None,
    dv_dt: Optional[VectorField3] = None,
    reading: Union[GradientReading, str] = GradientReading.NABLA,
) -> float:
    """E = ½(||∇(u-v)||² + ||∂_t(u-v)||²); time derivatives default to the flow itself."""
    du_dt = hwm_rhs(u) if du_dt is None else du_dt
    dv_dt = hwm_rhs(v) if dv_dt is None else dv_dt
    w = u - v
    if GradientReading(reading) == GradientReading.NABLA:
        spatial = gradient_norm_squared(w)
    else:
        dw = fractional_laplacian(w, 1.0)
        spatial = dw.inner(dw)
    wt = du_dt - dv_dt
    return 0.5 * (spatial + wt.inner(wt))


def _check_alpha(alpha: float, d: int):
    if not 1 < alpha < d + 0.5:
        raise ParameterOutOfRange(f"alpha must lie in (1, d + 1/2) = (1, {d + 0.5}), got {alpha}")


def sigma(u: VectorField3, v: VectorField3, alpha: float = DEFAULT_ALPHA) -> float:
    """||D^α u||²_{2d/(2α-1)} + ||D^α v||² + ||D¹u||²_{(2d,2)} + ||D¹v||²_{(2d,2)}, unit constants."""
    d = u.grid.dim
    _check_alpha(alpha, d)
    p = 2 * d / (2 * alpha - 1)
    lorentz = LorentzParams(p=2 * d, q=2)

    def high(x):
        return lp_norm(fractional_laplacian(x, alpha), p) ** 2

    def low(x):
        return lorentz_norm(fractional_laplacian(x, 1.0), lorentz) ** 2

    return (high(u) + high(v)) + (low(u) + low(v))


def default_profile(grid) -> ScalarField:
    """½(1 + cos x_1): smooth, nonnegative, one Fourier mode."""
    x = grid.coordinates()[0] * (2 * np.pi / grid.lengths[0])
    return ScalarField(grid, 0.5 * (1.0 + np.cos(x)))


def perturb_by_rotation(
    u0: SphereField,
    epsilon: float,
    axis: Sequence[float] = (1.0, 0.0, 0.0),
    profile: Optional[ScalarField] = None,
) -> SphereField:
    """Rotate u0 pointwise about a fixed axis by angle ε·profile; stays exactly unit."""
    profile = default_profile(u0.grid) if profile is None else profile
    return rotate_pointwise(u0, axis, profile * epsilon)


@dataclass(eq=False)
class EnergyTrace:
    times: np.ndarray
    energy: np.ndarray
    sigma: np.ndarray
    alpha: float
    epsilon: float
    c_star: float
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(self.energy < 0) or np.any(self.sigma < 0):
            raise ValueError("energy and sigma must be nonnegative")

    def cumulative_sigma(self) -> np.ndarray:
        increments = 0.5 * np.diff(self.times) * (self.sigma[1:] + self.sigma[:-1])
        return np.concatenate(([0.0], np.cumsum(increments)))

    def log_energy(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.energy)

    def bound_holds(self, c_star: Optional[float] = None, rel_tol: float = 1e-12) -> bool:
        """E(t) <= E(0) exp(C* ∫₀^t Σ) at every recorded time."""
        c = self.c_star if c_star is None else c_star
        bound = self.energy[0] * np.exp(c * self.cumulative_sigma())
        return bool(np.all(self.energy <= bound * (1 + rel_tol) + ENERGY_FLOOR))

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        table = np.column_stack([self.times, self.energy, self.sigma, self.log_energy()])
        np.savetxt(path, table, fmt="%.17e", delimiter=",", header="t,E,Sigma,logE", comments="")
        return path

    def sidecar(self) -> Dict:
        return {**self.metadata, "alpha": self.alpha, "epsilon": self.epsilon, "c_star": self.c_star}

    def write_sidecar(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True))
        return path


def fit_gronwall_constant(times: np.ndarray, energy: np.ndarray, sig: np.ndarray, floor: float = ENERGY_FLOOR) -> float:
    """max over intervals of Δ log E / ∫ Σ dt, skipping intervals with E below the floor."""
    best = None
    for n in range(len(times) - 1):
        if energy[n] <= floor or energy[n + 1] <= floor:
            continue
        integral = 0.5 * (times[n + 1] - times[n]) * (sig[n] + sig[n + 1])
        if integral <= 0:
            continue
        rate = (math.log(energy[n + 1]) - math.log(energy[n])) / integral
        best = rate if best is None else max(best, rate)
    return 0.0 if best is None else float(best)


def gronwall_experiment(
    u0: SphereField,
    epsilon: float,
    alpha: float = DEFAULT_ALPHA,
    T: float = 0.5,
    dt: float = 1e-3,
    method: Union[Method, str] = Method.LIE_MIDPOINT,
    axis: Sequence[float] = (1.0, 0.0, 0.0),
    profile: Optional[ScalarField] = None,
    reading: Union[GradientReading, str] = GradientReading.NABLA,
) -> EnergyTrace:
    """Evolve u0 and its ε-rotation side by side and record E(t), Σ(t)."""
    if epsilon < 0:
        raise ParameterOutOfRange(f"epsilon must be >= 0, got {epsilon}")
    _check_alpha(alpha, u0.grid.dim)
    method = Method(method)
    n_steps = _step_count(T, dt)
    u = u0
    v = perturb_by_rotation(u0, epsilon, axis, profile) if epsilon > 0 else u0
    times, energy, sig = [], [], []
    for n in range(n_steps + 1):
        if n > 0:
            u = step(u, dt, method)
            v = step(v, dt, method)
        times.append(n * dt)
        energy.append(pair_energy(u, v, reading=reading))
        sig.append(sigma(u, v, alpha))
        if n == 0 and epsilon > 0 and energy[0] <= ENERGY_FLOOR:
            raise DegenerateEnergy(
                f"E(0) = {energy[0]:.3e} for epsilon={epsilon}; the rotation axis is parallel to u0"
            )
    times, energy, sig = np.array(times), np.array(energy), np.array(sig)
    c_star = fit_gronwall_constant(times, energy, sig)
    logger.info("Grönwall run eps=%g alpha=%g: E(0)=%.3e C*=%.4g", epsilon, alpha, energy[0], c_star)
    metadata = {
        "grid": {"sizes": list(u0.grid.sizes), "lengths": list(u0.grid.lengths)},
        "dt": dt,
        "T": T,
        "method": method.value,
    }
    return EnergyTrace(times, energy, sig, alpha, epsilon, c_star, metadata)
