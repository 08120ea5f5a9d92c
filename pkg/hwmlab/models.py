"""
Pydantic models for experiment configuration and reports
"""
import math
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from hwmlab.config import DEFAULT_SEED, INTEGRAL_TOL, POINTWISE_TOL

SUBCOMMANDS = ("identities", "operators", "inequalities", "simulate", "gronwall", "strichartz")


class ExperimentConfig(BaseModel):
    """One run of a harness subcommand. Unset grid/time fields take per-subcommand defaults."""

    model_config = ConfigDict(extra="forbid")

    subcommand: Optional[str] = None
    dim: Optional[int] = None
    n: Optional[int] = None
    length: float = 2 * math.pi
    seed: int = DEFAULT_SEED
    samples: Optional[int] = None
    band: int = 3
    method: str = "lie_midpoint"
    dt: Optional[float] = None
    t_final: Optional[float] = None
    alphas: Optional[List[float]] = None
    epsilons: Optional[List[float]] = None
    pointwise_tol: float = POINTWISE_TOL
    integral_tol: float = INTEGRAL_TOL
    output_dir: Optional[str] = None
    dump_fields: bool = False

    @field_validator("alphas", "epsilons", mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            return [float(item) for item in value.split(",") if item.strip()]
        return value

    @field_validator("subcommand")
    @classmethod
    def _check_subcommand(cls, value):
        if value is not None and value not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {value!r}; expected one of {', '.join(SUBCOMMANDS)}")
        return value

    @field_validator("method")
    @classmethod
    def _check_method(cls, value):
        if value not in ("lie_midpoint", "rk4_project"):
            raise ValueError(f"method must be lie_midpoint or rk4_project, got {value!r}")
        return value

    @field_validator("dim")
    @classmethod
    def _check_dim(cls, value):
        if value is not None and not 1 <= value <= 5:
            raise ValueError(f"dim must be in 1..5, got {value}")
        return value

    @field_validator("pointwise_tol", "integral_tol", "length")
    @classmethod
    def _check_positive(cls, value):
        if not value > 0:
            raise ValueError(f"must be positive, got {value}")
        return value

    def with_defaults(self, defaults: Dict[str, Any]) -> "ExperimentConfig":
        update = {key: value for key, value in defaults.items() if getattr(self, key) is None}
        return self.model_copy(update=update)


class IdentityReport(BaseModel):
    """Worst error of one identity over all sampled pairs; parts breaks a composite check down."""

    identity: str
    max_pointwise_error: Optional[float] = Field(default=None, ge=0)
    integral_error: Optional[float] = Field(default=None, ge=0)
    tolerance: float
    samples: int
    passed: bool
    parts: Dict[str, float] = Field(default_factory=dict)


class RunReport(BaseModel):
    """report.json: {subcommand, config_echo, results[], pass}."""

    model_config = ConfigDict(populate_by_name=True)

    subcommand: str
    config_echo: Dict[str, Any]
    results: List[Dict[str, Any]]
    passed: bool = Field(alias="pass")
