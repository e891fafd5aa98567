from __future__ import annotations
from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List, Optional, Dict, Literal, Union
import math

Classification = Literal["negative", "nonnegative", "within-tolerance-of-zero"]

VERDICT_DETECTED = "Imaginarity detected"
VERDICT_INCONCLUSIVE = "Inconclusive"


def verdict_not_detected(m_max: int) -> str:
    return f"Not detected up to order {m_max}"


class DeterminantRecord(BaseModel):
    m: int
    value: float
    classification: Classification

class MomentRecord(BaseModel):
    n: int
    value: float
    imag_residual: float = 0.0

class DetectionReport(BaseModel):
    verdict: str
    detected: bool
    minimal_order: Optional[int] = None
    m_max: int
    determinants: List[DeterminantRecord] = Field(default_factory=list)
    moments: List[MomentRecord] = Field(default_factory=list)
    max_imag_residual: float = 0.0
    reference_M_l1: float
    basis_a: str
    basis_b: str
    mub_deviation: float = 0.0
    state: str = ""
    tolerances: Dict[str, float] = Field(default_factory=dict)
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _detected_needs_negative_det(self) -> "DetectionReport":
        if self.detected and not any(d.classification == "negative" for d in self.determinants):
            raise ValueError("verdict 'detected' requires a negative determinant")
        return self

class MultiBasisReport(BaseModel):
    detected: bool
    reports: List[DetectionReport]

class VisibilitySummary(BaseModel):
    visibility: float               # grid-sweep (Fourier fit) value, or analytic when method=analytic
    chi: float                      # phase at maximum intensity
    analytic_visibility: float      # |Tr(U rho)|
    method: Literal["analytic", "grid-sweep", "both"] = "both"
    grid_size: int = 0
    fit_residual: float = 0.0
    intensity_max: Optional[float] = None
    intensity_min: Optional[float] = None

class InterferenceSummary(BaseModel):
    unitary: str
    internal_dim: int
    trace_re: float
    trace_im: float
    summary: VisibilitySummary
    signed_moment: Optional[float] = None   # Tr[S_n rho'^{(x)n}] for s_n specs
    copies: Optional[int] = None
    operator_unitarity_residual: Optional[float] = None   # max |S_n^dagger S_n - I| before dilation
    dilated: bool = False

class GeneratorVisibility(BaseModel):
    p: int
    q: int
    visibility: float        # |Im Tr(U_pq rho)| = |2 I(pi/2) - 1|
    raw_visibility: float    # |Tr(U_pq rho)|, includes the untouched complement

class SweepConfig(BaseModel):
    alpha_start: float
    alpha_stop: float
    alpha_count: int
    beta_values: List[float]
    m_max: int = 3
    tol: float = 1e-10
    tol_det: float = 1e-12
    out: str

    @field_validator("alpha_count")
    @classmethod
    def _count_at_least_two(cls, v: int) -> int:
        if v < 2:
            raise ValueError(f"alpha grid needs count >= 2, got {v}")
        return v

    @field_validator("beta_values")
    @classmethod
    def _beta_in_range(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("at least one beta value is required")
        for b in values:
            if not (0.0 <= b <= 2 * math.pi + 1e-12):
                raise ValueError(f"beta must lie in [0, 2pi], got {b}")
        return values

    @field_validator("m_max")
    @classmethod
    def _m_max_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"m_max must be >= 1, got {v}")
        return v

class SweepRow(BaseModel):
    alpha: float
    beta: float
    det_h1: float
    det_h2: float
    det_h3: float
    minimal_order: int   # 0 = none
    m_l1: float

class StateFile(BaseModel):
    dim: int
    re: List[List[float]]
    im: List[List[float]]

    @model_validator(mode="after")
    def _shapes(self) -> "StateFile":
        for name, rows in (("re", self.re), ("im", self.im)):
            if len(rows) != self.dim or any(len(r) != self.dim for r in rows):
                raise ValueError(f"'{name}' must be a {self.dim}x{self.dim} matrix")
        return self

class TensorEntry(BaseModel):
    i: int
    j: int
    k: int
    re: float
    im: float

class TensorDump(BaseModel):
    dim: int
    entries: List[TensorEntry]

class CheckResult(BaseModel):
    name: str
    description: str
    passed: bool
    max_residual: float = 0.0
    threshold: float = 0.0
    cases: int = 0
    seconds: float = 0.0
    detail: str = ""

class VerifyReport(BaseModel):
    level: Literal["fast", "full"]
    passed: bool
    checks: List[CheckResult]
    settings: Dict[str, Union[int, float]]

class CopyCount(BaseModel):
    dim: int
    m_max: int
    generator_circuits: int   # d(d-1)/2 direct-visibility circuits
    moment_orders: int        # 2*m_max + 1 moments r_1..r_{2m+1}
