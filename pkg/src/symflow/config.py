"""Scenario configuration for the batch CLI.

Each subcommand has its own model; unknown keys are rejected and range errors
name the offending field.  A config file is a JSON object with a
``"subcommand"`` key plus any of that subcommand's fields.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .pairspace import MAX_DIM
from .states import KINDS
from .symmap import SCHEDULE_KINDS


class ConfigError(ValueError):
    pass


class _Base(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(0, ge=0)
    out: Optional[str] = None


class VerifyConfig(_Base):
    subcommand: Literal["verify"] = "verify"
    d: int = Field(3, ge=2, le=MAX_DIM)


class _Evolution(_Base):
    d: int = Field(2, ge=2, le=MAX_DIM)
    kind: Literal[KINDS] = "generic"
    elements: list[tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _elements_in_range(self):
        n = self.d * self.d
        for i, j in self.elements:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"elements: index pair ({i}, {j}) outside 0..{n - 1}")
        return self


class SemigroupConfig(_Evolution):
    subcommand: Literal["evolve-semigroup"] = "evolve-semigroup"
    tau_max: float = Field(3.0, ge=0)
    samples: int = Field(31, ge=2, le=100_000)


class MasterConfig(_Evolution):
    subcommand: Literal["evolve-master"] = "evolve-master"
    gamma: float = Field(0.5, ge=0)
    dt: float = Field(0.01, gt=0)
    t_max: float = Field(2.0, ge=0)
    sample_every: int = Field(10, ge=1)
    hamiltonian: Literal["zero", "random"] = "zero"
    h_scale: float = Field(1.0, ge=0)


class QndConfig(_Base):
    subcommand: Literal["qnd"] = "qnd"
    g: float = Field(1.0, gt=0)
    b: float = Field(10.0, gt=0)
    theta_min: Optional[float] = Field(None, gt=0)
    theta_max: float = Field(20.0, gt=0)
    samples: int = Field(50, ge=1, le=100_000)
    cutoff: Literal["exponential", "step"] = "exponential"


class SymmapConfig(_Base):
    subcommand: Literal["symmap"] = "symmap"
    d: int = Field(3, ge=2, le=MAX_DIM)
    schedule: Literal[SCHEDULE_KINDS] = "to_antisymmetric"
    kappa: float = Field(1.0, gt=0)
    t_max: float = Field(8.0, ge=0)
    samples: int = Field(33, ge=2, le=100_000)
    state: Literal["balanced_paos", "paos", "perfectly_asymmetric"] = "balanced_paos"


class ScatterConfig(_Base):
    subcommand: Literal["scatter"] = "scatter"
    spin_s: float = Field(0.5, ge=0)
    epsilon: Literal[1, -1] = 1
    F_n: Optional[tuple[float, float]] = None
    F_minus_n: Optional[tuple[float, float]] = None
    schedule: Literal[SCHEDULE_KINDS] = "to_symmetric"
    kappa: float = Field(1.0, gt=0)
    g: float = Field(1.0, gt=0)
    b: float = Field(10.0, gt=0)
    tau_rate: Optional[float] = Field(None, ge=0)
    t_max: float = Field(8.0, ge=0)
    samples: int = Field(33, ge=2, le=100_000)

    @field_validator("spin_s")
    @classmethod
    def _half_integer(cls, v):
        if abs(2 * v - round(2 * v)) > 1e-12:
            raise ValueError("spin_s must be a nonnegative half-integer")
        return v

    @model_validator(mode="after")
    def _amplitudes_together(self):
        if (self.F_n is None) != (self.F_minus_n is None):
            raise ValueError("F_n and F_minus_n must be given together")
        return self


class CpcheckConfig(_Base):
    subcommand: Literal["cpcheck"] = "cpcheck"
    delta: float = Field(0.4, gt=0)
    m: float = Field(-0.5, ge=-0.5, le=0.5)
    scan: bool = False
    delta_grid: list[float] = Field(default_factory=lambda: [round(0.05 * k, 10) for k in range(1, 10)])
    m_grid: list[float] = Field(default_factory=lambda: [round(-0.5 + 0.1 * k, 10) for k in range(11)])


SWEEP_TARGETS = ("evolve-semigroup", "evolve-master", "qnd", "symmap", "scatter", "cpcheck")


class SweepConfig(_Base):
    subcommand: Literal["sweep"] = "sweep"
    target: Literal[SWEEP_TARGETS] = "qnd"
    param: str = "b"
    values: list[float] = Field(default_factory=lambda: [1.0, 5.0, 20.0])
    base: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _param_known(self):
        model = MODELS[self.target]
        if self.param not in model.model_fields or self.param in ("subcommand", "out"):
            raise ValueError(f"param: {self.param!r} is not a field of {self.target}")
        if not self.values:
            raise ValueError("values: at least one value required")
        for v in self.values:
            scenario(self.target, self.base, {self.param: v})
        return self


MODELS = {
    "verify": VerifyConfig,
    "evolve-semigroup": SemigroupConfig,
    "evolve-master": MasterConfig,
    "qnd": QndConfig,
    "symmap": SymmapConfig,
    "scatter": ScatterConfig,
    "cpcheck": CpcheckConfig,
    "sweep": SweepConfig,
}


def _describe(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"]) or "config"
        parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def scenario(subcommand: str, data: dict | None = None, overrides: dict | None = None):
    """Validate ``data`` updated with ``overrides`` against the subcommand model."""
    if subcommand not in MODELS:
        raise ConfigError(f"subcommand: unknown value {subcommand!r}")
    merged = dict(data or {})
    merged.pop("subcommand", None)
    merged.update(overrides or {})
    try:
        return MODELS[subcommand](**merged)
    except ValidationError as err:
        raise ConfigError(_describe(err)) from None


def load_config(path) -> BaseModel:
    """Read and validate a JSON scenario file."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    if not isinstance(data, dict) or "subcommand" not in data:
        raise ConfigError("subcommand: config must be a JSON object with a 'subcommand' key")
    return scenario(data["subcommand"], data)


def config_schema() -> dict:
    """JSON schema of every subcommand model, keyed by subcommand."""
    return {name: model.model_json_schema() for name, model in MODELS.items()}
