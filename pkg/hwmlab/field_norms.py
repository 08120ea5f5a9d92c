"""
L^p and Lorentz norms by grid quadrature, and the Sobolev / Gagliardo-Nirenberg
quotient evaluators.

Each quotient returns LHS/RHS of the inequality with no constant; the
empirical constant of a "≲" statement is the max over a seeded family.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from hwmlab.config import WORKERS
from hwmlab.errors import ParameterOutOfRange
from hwmlab.spectral_core import (
    ScalarField,
    TorusGrid,
    VectorField3,
    fractional_laplacian,
    project_mean,
)

logger = logging.getLogger(__name__)

Field = Union[ScalarField, VectorField3]


class LorentzParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    q: float = math.inf

    @field_validator("p")
    @classmethod
    def _check_p(cls, p):
        if not (p > 1 and math.isfinite(p)):
            raise ValueError(f"Lorentz exponent p must lie in (1, inf), got {p}")
        return p

    @field_validator("q")
    @classmethod
    def _check_q(cls, q):
        if not q >= 1:
            raise ValueError(f"Lorentz exponent q must lie in [1, inf], got {q}")
        return q


class QuotientReport(BaseModel):
    """Empirical constant for one inequality over a seeded sample family."""

    inequality: str
    params: Dict[str, float]
    n_samples: int
    max: float
    median: float
    quotients: List[float]
    seed: int
    grid: Dict[str, List[float]]

    @field_validator("quotients")
    @classmethod
    def _check_quotients(cls, quotients):
        for value in quotients:
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"quotients must be finite and nonnegative, got {value}")
        return quotients


def magnitude(f: Field) -> np.ndarray:
    """Pointwise |f|; Euclidean length for vector fields."""
    if isinstance(f, VectorField3):
        return np.sqrt(np.sum(f.values ** 2, axis=0))
    return np.abs(f.values)


def lp_norm(f: Field, p: float) -> float:
    if not p >= 1:
        raise ParameterOutOfRange(f"L^p exponent must be >= 1, got {p}")
    a = magnitude(f)
    if math.isinf(p):
        return float(np.max(a))
    return float((np.sum(a ** p) * f.grid.cell_volume) ** (1.0 / p))


def lorentz_norm(f: Field, lp: LorentzParams) -> float:
    """||f||_{L^{p,q}} of the piecewise-constant decreasing rearrangement, closed form per cell.

    On the torus f* vanishes past the total measure, so the tail is truncated
    there; comparisons only make sense within a fixed-grid family.
    """
    a = np.sort(magnitude(f).ravel())[::-1]
    top = a[0] if a.size else 0.0
    if top == 0:
        return 0.0
    a = a / top
    dx = f.grid.cell_volume
    t = dx * np.arange(1, a.size + 1)
    p, q = lp.p, lp.q
    if math.isinf(q):
        return float(top * np.max(t ** (1.0 / p) * a))
    weights = (p / q) * np.diff(np.concatenate(([0.0], t ** (q / p))))
    return float(top * np.sum(a ** q * weights) ** (1.0 / q))


def mixed_norm(f: Field, p: float, q: Optional[float] = None) -> float:
    """L^p norm, or L^{p,q} when q is given."""
    if q is None:
        return lp_norm(f, p)
    return lorentz_norm(f, LorentzParams(p=p, q=q))


def ratio(lhs: float, rhs: float) -> float:
    """LHS/RHS with 0/0 read as 0."""
    if lhs == 0:
        return 0.0
    if rhs == 0:
        return math.inf
    return lhs / rhs


def sobolev_quotient(f: Field, alpha: float, p: float, q: Optional[float] = None) -> float:
    """||f - mean||_{dp/(d-αp)} / ||D^α f||_p, optionally in the Lorentz scale L^{·,q}."""
    d = f.grid.dim
    if not 0 < alpha < d:
        raise ParameterOutOfRange(f"Sobolev inequality needs alpha in (0, d={d}), got {alpha}")
    if not 1 < p < d / alpha:
        raise ParameterOutOfRange(f"Sobolev inequality needs p in (1, d/alpha={d / alpha:g}), got {p}")
    target = d * p / (d - alpha * p)
    lhs = mixed_norm(project_mean(f), target, q)
    rhs = mixed_norm(fractional_laplacian(f, alpha), p, q)
    return ratio(lhs, rhs)


def gn_quotient(f: Field, beta: float, p: float) -> float:
    """||D^β f||_{p/β} / (||f||_∞^{1-β} ||D¹f||_p^β)."""
    if not 0 < beta < 1:
        raise ParameterOutOfRange(f"Gagliardo-Nirenberg needs beta in (0, 1), got {beta}")
    if not 1 < p < math.inf:
        raise ParameterOutOfRange(f"Gagliardo-Nirenberg needs p in (1, inf), got {p}")
    lhs = lp_norm(fractional_laplacian(f, beta), p / beta)
    rhs = lp_norm(f, math.inf) ** (1 - beta) * lp_norm(fractional_laplacian(f, 1.0), p) ** beta
    return ratio(lhs, rhs)


def gns_theta(beta: float, p: float, d: int) -> float:
    if 0 < beta <= 0.5:
        ok = p >= 2 * d / beta
    elif 0.5 < beta <= 1:
        ok = 2 * d / beta <= p <= 2 * d / (2 * beta - 1)
    else:
        ok = False
    if not ok:
        raise ParameterOutOfRange(
            f"Gagliardo-Nirenberg-Sobolev needs beta in (0, 1/2] with p >= 2d/beta, "
            f"or beta in (1/2, 1] with 2d/beta <= p <= 2d/(2beta-1); got beta={beta}, p={p}, d={d}"
        )
    return 2 * (beta - d / p)


def gns_quotient(f: Field, beta: float, p: float) -> float:
    """||D^β f||_p / (||f||_∞^{1-θ} ||D¹f||_{2d}^θ) with θ = 2(β - d/p)."""
    d = f.grid.dim
    theta = gns_theta(beta, p, d)
    lhs = lp_norm(fractional_laplacian(f, beta), p)
    rhs = lp_norm(f, math.inf) ** (1 - theta) * lp_norm(fractional_laplacian(f, 1.0), 2 * d) ** theta
    return ratio(lhs, rhs)


def sample_quotients(evaluate: Callable[[int], float], seeds: Iterable[int], workers: int = WORKERS) -> List[float]:
    """Evaluate one quotient per seed; results come back in seed order."""
    seeds = list(seeds)
    if workers <= 1:
        return [evaluate(seed) for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, seeds))


def build_quotient_report(
    inequality: str,
    params: Dict[str, float],
    quotients: List[float],
    seed: int,
    grid: TorusGrid,
) -> QuotientReport:
    values = [float(q) for q in quotients]
    report = QuotientReport(
        inequality=inequality,
        params={k: float(v) for k, v in params.items()},
        n_samples=len(values),
        max=float(np.max(values)) if values else 0.0,
        median=float(np.median(values)) if values else 0.0,
        quotients=values,
        seed=seed,
        grid={"sizes": [float(n) for n in grid.sizes], "lengths": list(grid.lengths)},
    )
    logger.debug("%s: %d samples, max quotient %.4g", inequality, report.n_samples, report.max)
    return report
