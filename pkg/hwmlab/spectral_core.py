"""
Periodic grids, real grid fields and exact Fourier-multiplier operators.

Every operator here is a symbol applied on the real-FFT lattice of a
TorusGrid: fractional Laplacian D^s = |∇|^s, Riesz potential |k|^{-s},
Riesz transforms, partial derivatives, the Laplacian and the wave
propagator symbols. Fields are immutable; spectral data only lives for
the duration of one operation.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import scipy.fft
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from hwmlab.config import FFT_WORKERS, MEAN_ZERO_TOL, SPHERE_TOL
from hwmlab.errors import (
    ConstraintViolation,
    GridMismatch,
    MeanNotZero,
    NonFiniteField,
    ParameterOutOfRange,
)

logger = logging.getLogger(__name__)

MAX_DIM = 5


class TorusGrid(BaseModel):
    """d-dimensional periodic lattice [0, L_1) x ... x [0, L_d)."""

    model_config = ConfigDict(frozen=True)

    sizes: Tuple[int, ...]
    lengths: Tuple[float, ...]

    @field_validator("sizes")
    @classmethod
    def _check_sizes(cls, sizes):
        if not 1 <= len(sizes) <= MAX_DIM:
            raise ValueError(f"grid dimension must be in 1..{MAX_DIM}, got {len(sizes)}")
        for n in sizes:
            if n < 8 or n % 2:
                raise ValueError(f"point counts must be even and >= 8, got {n}")
        return sizes

    @field_validator("lengths")
    @classmethod
    def _check_lengths(cls, lengths):
        for length in lengths:
            if not (length > 0 and math.isfinite(length)):
                raise ValueError(f"box lengths must be positive, got {length}")
        return lengths

    @model_validator(mode="after")
    def _check_rank(self):
        if len(self.sizes) != len(self.lengths):
            raise ValueError("sizes and lengths must have the same rank")
        return self

    @classmethod
    def cube(cls, dim: int, n: int, length: float = 2 * np.pi) -> "TorusGrid":
        return cls(sizes=(n,) * dim, lengths=(float(length),) * dim)

    @property
    def dim(self) -> int:
        return len(self.sizes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.sizes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod([length / n for n, length in zip(self.sizes, self.lengths)]))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(length / n for n, length in zip(self.sizes, self.lengths))

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        axes = [np.arange(n) * (length / n) for n, length in zip(self.sizes, self.lengths)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def wavenumbers(self) -> Tuple[np.ndarray, ...]:
        """Per-axis wavenumbers k_j = 2π m_j / L_j broadcast on the rfft lattice."""
        return _wavenumbers(self.sizes, self.lengths)[0]

    def mode_indices(self) -> Tuple[np.ndarray, ...]:
        """Integer lattice indices m_j in the same layout as wavenumbers()."""
        return _wavenumbers(self.sizes, self.lengths)[1]

    def wavenumber_magnitude(self) -> np.ndarray:
        return _wavenumbers(self.sizes, self.lengths)[2]

    def nyquist_mask(self, axis: int) -> np.ndarray:
        m = self.mode_indices()[axis]
        return np.abs(m) == self.sizes[axis] // 2


@lru_cache(maxsize=32)
def _wavenumbers(sizes: Tuple[int, ...], lengths: Tuple[float, ...]):
    dim = len(sizes)
    ks, ms = [], []
    for axis, (n, length) in enumerate(zip(sizes, lengths)):
        if axis == dim - 1:
            m = np.arange(n // 2 + 1, dtype=float)
        else:
            m = scipy.fft.fftfreq(n, d=1.0 / n)
        shape = [1] * dim
        shape[axis] = m.size
        ms.append(m.reshape(shape))
        ks.append((2 * np.pi / length * m).reshape(shape))
    kmag = np.sqrt(sum(k * k for k in ks))
    for arr in ks + ms + [kmag]:
        arr.setflags(write=False)
    return tuple(ks), tuple(ms), kmag


def _readonly(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatch("fields live on different grids")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real grid function, values stored row-major with shape grid.sizes."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        values = _readonly(self.values)
        if values.shape != self.grid.shape:
            raise GridMismatch(f"values shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteField("scalar field has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: TorusGrid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: TorusGrid, fn: Callable[..., np.ndarray]) -> "ScalarField":
        return cls(grid, np.broadcast_to(fn(*grid.coordinates()), grid.shape))

    def _wrap(self, values):
        return ScalarField(self.grid, values)

    def _other(self, other):
        if isinstance(other, ScalarField):
            _check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.values - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.values)

    def __mul__(self, other):
        if isinstance(other, VectorField3):
            return other * self
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.values / self._other(other))

    def __neg__(self):
        return self._wrap(-self.values)

    def abs(self) -> "ScalarField":
        return self._wrap(np.abs(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_volume)

    def inner(self, other: "ScalarField") -> float:
        _check_same_grid(self, other)
        return float(np.sum(self.values * other.values) * self.grid.cell_volume)


@dataclass(frozen=True, eq=False)
class VectorField3:
    """Three real components on a common grid, values shape (3, *grid.sizes)."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        values = _readonly(self.values)
        if values.shape != (3,) + self.grid.shape:
            raise GridMismatch(f"values shape {values.shape} does not match 3 x {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteField("vector field has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_components(cls, components: List[ScalarField]) -> "VectorField3":
        if len(components) != 3:
            raise ValueError("need exactly three components")
        for c in components[1:]:
            _check_same_grid(components[0], c)
        return cls(components[0].grid, np.stack([c.values for c in components]))

    @classmethod
    def constant(cls, grid: TorusGrid, vector) -> "VectorField3":
        vec = np.asarray(vector, dtype=float).reshape((3,) + (1,) * grid.dim)
        return cls(grid, np.broadcast_to(vec, (3,) + grid.shape))

    @classmethod
    def from_function(cls, grid: TorusGrid, fn: Callable[..., Tuple]) -> "VectorField3":
        comps = fn(*grid.coordinates())
        return cls(grid, np.stack([np.broadcast_to(c, grid.shape) for c in comps]))

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.grid, self.values[i])

    def components(self) -> List[ScalarField]:
        return [self.component(i) for i in range(3)]

    def _wrap(self, values):
        return VectorField3(self.grid, values)

    def _other(self, other):
        if isinstance(other, VectorField3):
            _check_same_grid(self, other)
            return other.values
        if isinstance(other, ScalarField):
            _check_same_grid(self, other)
            return other.values[None]
        return other

    def __add__(self, other):
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.values - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.values)

    def __mul__(self, other):
        if isinstance(other, VectorField3):
            raise TypeError("use dot() or cross() for vector-vector products")
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.values / self._other(other))

    def __neg__(self):
        return self._wrap(-self.values)

    def dot(self, other: "VectorField3") -> ScalarField:
        _check_same_grid(self, other)
        return ScalarField(self.grid, np.einsum("i...,i...->...", self.values, other.values))

    def cross(self, other: "VectorField3") -> "VectorField3":
        _check_same_grid(self, other)
        return self._wrap(np.cross(self.values, other.values, axis=0))

    def norm(self) -> ScalarField:
        return ScalarField(self.grid, np.sqrt(np.sum(self.values ** 2, axis=0)))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def integral(self) -> np.ndarray:
        axes = tuple(range(1, self.values.ndim))
        return np.sum(self.values, axis=axes) * self.grid.cell_volume

    def inner(self, other: "VectorField3") -> float:
        return self.dot(other).integral()

    def as_vector(self) -> "VectorField3":
        return VectorField3(self.grid, self.values)


@dataclass(frozen=True, eq=False)
class SphereField(VectorField3):
    """Unit-sphere valued field: max ||u(x)| - 1| <= SPHERE_TOL."""

    def __post_init__(self):
        super().__post_init__()
        drift = sphere_drift(self.values)
        if drift > SPHERE_TOL:
            raise ConstraintViolation(f"field is not unit length (max deviation {drift:.3e})")

    @classmethod
    def normalize(cls, field: VectorField3) -> "SphereField":
        norm = np.sqrt(np.sum(field.values ** 2, axis=0))
        if np.any(norm == 0):
            raise ConstraintViolation("cannot normalize a field that vanishes somewhere")
        return cls(field.grid, field.values / norm[None])

    @classmethod
    def constant(cls, grid: TorusGrid, vector) -> "SphereField":
        vec = np.asarray(vector, dtype=float)
        return cls.normalize(VectorField3.constant(grid, vec / np.linalg.norm(vec)))

    @classmethod
    def equator_map(cls, grid: TorusGrid, axis: int = 0) -> "SphereField":
        """(cos x, sin x, 0) along one axis; stationary for the half-wave maps flow when L = 2π."""
        x = grid.coordinates()[axis] * (2 * np.pi / grid.lengths[axis])
        return cls(grid, np.stack([np.cos(x), np.sin(x), np.zeros_like(x)]))


def sphere_drift(values: np.ndarray) -> float:
    return float(np.max(np.abs(np.sqrt(np.sum(values ** 2, axis=0)) - 1.0)))


Field = Union[ScalarField, VectorField3]


class MultiplierKind(str, Enum):
    FRAC_LAPLACIAN = "frac_laplacian"
    RIESZ_POTENTIAL = "riesz_potential"
    RIESZ_TRANSFORM = "riesz_transform"
    PARTIAL_DERIVATIVE = "partial_derivative"
    LAPLACIAN = "laplacian"
    WAVE_COS = "wave_cos"
    WAVE_SINC = "wave_sinc"
    WAVE_COS_RATE = "wave_cos_rate"


class ZeroModePolicy(str, Enum):
    ZERO = "zero"
    IDENTITY = "identity"
    ERROR = "error"


ODD_KINDS = (MultiplierKind.RIESZ_TRANSFORM, MultiplierKind.PARTIAL_DERIVATIVE)


class SpectralMultiplier(BaseModel):
    """Fourier symbol specification plus the policy for the k = 0 mode."""

    model_config = ConfigDict(frozen=True)

    kind: MultiplierKind
    order: float = 0.0
    axis: int = 0
    time: float = 0.0
    zero_mode: ZeroModePolicy = ZeroModePolicy.ZERO

    @classmethod
    def frac_laplacian(cls, s: float) -> "SpectralMultiplier":
        policy = ZeroModePolicy.ERROR if s < 0 else ZeroModePolicy.ZERO
        return cls(kind=MultiplierKind.FRAC_LAPLACIAN, order=s, zero_mode=policy)

    @classmethod
    def riesz_potential(cls, s: float, zero_mode: ZeroModePolicy = ZeroModePolicy.ERROR) -> "SpectralMultiplier":
        return cls(kind=MultiplierKind.RIESZ_POTENTIAL, order=s, zero_mode=zero_mode)

    @classmethod
    def riesz_transform(cls, axis: int) -> "SpectralMultiplier":
        return cls(kind=MultiplierKind.RIESZ_TRANSFORM, axis=axis)

    @classmethod
    def partial_derivative(cls, axis: int) -> "SpectralMultiplier":
        return cls(kind=MultiplierKind.PARTIAL_DERIVATIVE, axis=axis)

    @classmethod
    def laplacian(cls) -> "SpectralMultiplier":
        return cls(kind=MultiplierKind.LAPLACIAN)

    @classmethod
    def wave_cos(cls, t: float) -> "SpectralMultiplier":
        return cls(kind=MultiplierKind.WAVE_COS, time=t)

    @classmethod
    def wave_sinc(cls, t: float) -> "SpectralMultiplier":
        return cls(kind=MultiplierKind.WAVE_SINC, time=t)

    @classmethod
    def wave_cos_rate(cls, t: float) -> "SpectralMultiplier":
        return cls(kind=MultiplierKind.WAVE_COS_RATE, time=t)

    @property
    def is_odd(self) -> bool:
        return self.kind in ODD_KINDS

    def _power(self, kmag: np.ndarray, s: float) -> np.ndarray:
        out = np.zeros_like(kmag)
        nonzero = kmag > 0
        out[nonzero] = kmag[nonzero] ** s
        if s == 0:
            out[~nonzero] = 1.0
        return out

    def symbol(self, grid: TorusGrid) -> np.ndarray:
        """Symbol on the rfft lattice of grid; the k = 0 entry follows the zero-mode policy."""
        ks = grid.wavenumbers()
        kmag = grid.wavenumber_magnitude()
        kind = self.kind
        if kind in (MultiplierKind.RIESZ_TRANSFORM, MultiplierKind.PARTIAL_DERIVATIVE):
            if not 0 <= self.axis < grid.dim:
                raise ParameterOutOfRange(f"axis {self.axis} out of range for a {grid.dim}-d grid")
            k = np.broadcast_to(ks[self.axis], kmag.shape)
            if kind == MultiplierKind.PARTIAL_DERIVATIVE:
                sym = 1j * k
            else:
                sym = 1j * k * self._power(kmag, -1.0)
            return np.where(grid.nyquist_mask(self.axis), 0.0, sym)
        if kind == MultiplierKind.RIESZ_POTENTIAL:
            if not 0 < self.order < grid.dim:
                raise ParameterOutOfRange(
                    f"Riesz potential order must lie in (0, {grid.dim}), got {self.order}"
                )
            sym = self._power(kmag, -self.order)
        elif kind == MultiplierKind.FRAC_LAPLACIAN:
            sym = self._power(kmag, self.order)
        elif kind == MultiplierKind.LAPLACIAN:
            sym = -kmag ** 2
        elif kind == MultiplierKind.WAVE_COS:
            sym = np.cos(self.time * kmag)
        elif kind == MultiplierKind.WAVE_SINC:
            sym = np.where(kmag > 0, np.sin(self.time * kmag) / np.where(kmag > 0, kmag, 1.0), self.time)
        else:
            sym = -kmag * np.sin(self.time * kmag)
        if self._singular_at_zero and self.zero_mode == ZeroModePolicy.IDENTITY:
            sym = sym.copy()
            sym.flat[0] = 1.0
        return sym

    @property
    def _singular_at_zero(self) -> bool:
        if self.kind == MultiplierKind.RIESZ_POTENTIAL:
            return True
        return self.kind == MultiplierKind.FRAC_LAPLACIAN and self.order < 0


def _transform_axes(field: Field) -> Tuple[int, ...]:
    return tuple(range(-field.grid.dim, 0))


def _check_mean(field: Field, m: SpectralMultiplier):
    values = field.values
    axes = _transform_axes(field)
    means = np.mean(values, axis=axes)
    scale = np.max(np.abs(values)) if values.size else 0.0
    if np.any(np.abs(means) > MEAN_ZERO_TOL * scale):
        raise MeanNotZero(
            f"{m.kind.value}(s={m.order}) needs mean-zero input, got mean {np.max(np.abs(means)):.3e}"
        )


def apply_multiplier(f: Field, m: SpectralMultiplier) -> Field:
    """Inverse transform of symbol(k) * f_hat(k); vector fields are handled componentwise."""
    if m._singular_at_zero and m.zero_mode == ZeroModePolicy.ERROR:
        _check_mean(f, m)
    axes = _transform_axes(f)
    grid = f.grid
    spectrum = scipy.fft.rfftn(f.values, axes=axes, workers=FFT_WORKERS)
    spectrum *= m.symbol(grid)
    values = scipy.fft.irfftn(spectrum, s=grid.shape, axes=axes, workers=FFT_WORKERS)
    if isinstance(f, VectorField3):
        return VectorField3(grid, values)
    return ScalarField(grid, values)


def fractional_laplacian(f: Field, s: float) -> Field:
    """D^s f with symbol |k|^s."""
    return apply_multiplier(f, SpectralMultiplier.frac_laplacian(s))


def half_laplacian(f: Field) -> Field:
    return fractional_laplacian(f, 1.0)


def project_mean(f: Field) -> Field:
    """f minus its grid mean (per component for vector fields)."""
    axes = _transform_axes(f)
    values = f.values - np.mean(f.values, axis=axes, keepdims=True)
    if isinstance(f, VectorField3):
        return VectorField3(f.grid, values)
    return ScalarField(f.grid, values)


def riesz_potential(f: Field, s: float, project: bool = False) -> Field:
    """I^s f with symbol |k|^{-s}; pass project=True to drop the mean first."""
    if project:
        f = project_mean(f)
    return apply_multiplier(f, SpectralMultiplier.riesz_potential(s))


def riesz_transform(f: Field, axis: int) -> Field:
    return apply_multiplier(f, SpectralMultiplier.riesz_transform(axis))


def partial_derivative(f: Field, axis: int) -> Field:
    return apply_multiplier(f, SpectralMultiplier.partial_derivative(axis))


def gradient(f: Field) -> List[Field]:
    return [partial_derivative(f, axis) for axis in range(f.grid.dim)]


def laplacian(f: Field) -> Field:
    return apply_multiplier(f, SpectralMultiplier.laplacian())


def gradient_norm_squared(f: Field) -> float:
    """||∇f||²_{L²}, summed over components for vector fields."""
    return float(sum(np.sum(g.values ** 2) for g in gradient(f)) * f.grid.cell_volume)


def same_grid(*fields: Optional[Field]) -> TorusGrid:
    present = [f for f in fields if f is not None]
    for other in present[1:]:
        _check_same_grid(present[0], other)
    return present[0].grid
