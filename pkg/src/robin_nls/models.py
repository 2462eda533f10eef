from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class GridSpec(BaseModel):
    """Uniform grid x_j = j h, j = 0..N, so N intervals and L = N h"""
    h: float = Field(gt=0)
    N: int = Field(ge=2)


class ProfileDocument(BaseModel):
    """
    Initial profile as read from JSON.

    Either sampled data {lambda, q, grid: {h, N}, data: [[re, im], ...]} or a
    generator {generator: name, ...params}. Generator parameters stay in the
    model's extra fields.
    """
    model_config = ConfigDict(extra="allow", populate_by_name=True)

    lam: Optional[int] = Field(default=None, alias="lambda")
    q: Optional[float] = None
    grid: Optional[GridSpec] = None
    data: Optional[List[Tuple[float, float]]] = None
    generator: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if self.generator is not None:
            if self.data is not None:
                raise ValueError("give either data or generator, not both")
            return self
        missing = [name for name in ("lam", "q", "grid", "data") if getattr(self, name) is None]
        if missing:
            raise ValueError(f"sampled profile is missing {', '.join(missing)}")
        if not self.data:
            raise ValueError("data array is empty")
        if len(self.data) != self.grid.N + 1:
            raise ValueError(f"grid.N = {self.grid.N} needs {self.grid.N + 1} rows, data has {len(self.data)}")
        return self

    @property
    def generator_params(self) -> dict:
        params = dict(self.model_extra or {})
        if self.lam is not None:
            params["lam"] = self.lam
        if self.q is not None:
            params["q"] = self.q
        return params


class ZeroRecord(BaseModel):
    xi: Tuple[float, float]
    c: Optional[Tuple[float, float]] = None
    simple: bool = True


class SpectrumDocument(BaseModel):
    M: int = Field(ge=0)
    zeros: List[ZeroRecord] = Field(default_factory=list)
    # Not part of the minimal format; kept so a file can be read back into a spectrum
    lam: Optional[int] = Field(default=None, alias="lambda")
    q: Optional[float] = None
    dropped: List[Tuple[float, float]] = Field(default_factory=list)

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def _count(self):
        if self.M != len(self.zeros):
            raise ValueError(f"M = {self.M} but {len(self.zeros)} zeros listed")
        return self


class ComparisonReport(BaseModel):
    regime: str
    lam: int
    q: float
    t_values: List[float]
    errors: List[float]
    exponent: Optional[float] = None
    threshold: float
    passed: bool
    # |u_pde| - |u_pred| sup-norms, used for the radiation decay fit
    modulus_errors: List[float] = Field(default_factory=list)
    leading_modulus: List[float] = Field(default_factory=list)
    pde_modulus: List[float] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class StabilityReport(BaseModel):
    epsilon: float
    xi_exact: Tuple[float, float]
    xi_perturbed: Tuple[float, float]
    xi_shift: float
    t_values: List[float]
    residuals: List[float]
    fitted_omega: float
    fitted_alpha: Optional[float] = None
    passed: bool
