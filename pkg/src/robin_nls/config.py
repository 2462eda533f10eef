import json
import logging
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ProfileFormatError

logger = logging.getLogger("robin_config")

Subcommand = Literal["scatter", "zeros", "soliton", "asymptotics", "evolve", "compare"]


class Tolerances(BaseModel):
    """Numerical tolerances shared by every module"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    tail_tol: float = 1e-10
    unit_tol: float = 1e-8
    conv_tol: float = 1e-7
    singular_tol: float = 1e-9
    zero_sep: float = 1e-3
    loc_tol: float = 1e-8
    max_refinements: int = 4
    mass_tol: float = 1e-7
    energy_tol: float = 1e-6
    reflect_tol: float = 1e-4
    fixed_point_tol: float = 1e-12
    max_fixed_point_iter: int = 20
    reflection_cut: float = 1e-9
    reflection_tail_tol: float = 1e-6
    quad_tol: float = 1e-7
    pole_tol: float = 1e-12
    pole_proximity: float = 1e-6
    cauchy_radius: float = 0.1

    @field_validator("*")
    @classmethod
    def _positive(cls, value, info):
        if value <= 0:
            raise ValueError(f"{info.field_name} must be positive")
        return value


DEFAULT_TOLERANCES = Tolerances()


def _location(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(part) for part in first["loc"]) or "<root>"


def load_tolerances(path: Optional[Path | str] = None) -> Tolerances:
    """
    Load tolerance overrides from a JSON file.

    Args:
        path: JSON object mapping tolerance names to values. None returns the defaults.

    Returns:
        Tolerances with the overrides applied.
    """
    if path is None:
        return DEFAULT_TOLERANCES
    path = Path(path)
    try:
        overrides = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ProfileFormatError(e.msg, f"{path}:{e.lineno}:{e.colno}") from e
    if not isinstance(overrides, dict):
        raise ProfileFormatError("tolerance file must hold a JSON object", str(path))
    try:
        tolerances = Tolerances(**overrides)
    except ValidationError as e:
        raise ProfileFormatError(e.errors()[0]["msg"], f"{path}:{_location(e)}") from e
    logger.info(f"Loaded {len(overrides)} tolerance overrides from {path}")
    return tolerances


class RunConfig(BaseModel):
    """One CLI invocation"""
    model_config = ConfigDict(extra="forbid")

    subcommand: Subcommand
    profile_path: Optional[Path] = None
    generator: Optional[str] = None
    generator_params: Dict[str, Any] = Field(default_factory=dict)
    tolerances: Tolerances = DEFAULT_TOLERANCES
    threads: int = Field(default=1, ge=1)
    out_dir: Path = Path(".")
    options: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _one_profile_source(self):
        if self.subcommand == "soliton":
            return self
        if (self.profile_path is None) == (self.generator is None):
            raise ValueError("exactly one of profile_path or generator is required")
        return self
