from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class InvariantSet(str, Enum):
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    I4 = "I4"


class SolutionClass(str, Enum):
    TI = "TI"
    WP = "WP"


class OutputFormat(str, Enum):
    HUMAN = "human"
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


class ModelParams(BaseModel):
    """Tree order k, |A| = i and activity lambda."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    k: int = Field(..., ge=1)
    i: int = Field(..., ge=1)
    lam: float = Field(..., gt=0, alias="lambda")

    @model_validator(mode="after")
    def check_i_range(self) -> "ModelParams":
        if self.i > self.k + 1:
            raise ValueError(f"i must satisfy 1 <= i <= k+1, got k={self.k}, i={self.i}")
        return self

    def with_lambda(self, lam: float) -> "ModelParams":
        return ModelParams(k=self.k, i=self.i, lam=lam)


class BoundaryLaw4(BaseModel):
    """Components (z1, z2, z7, z8) of a weakly periodic boundary law."""
    model_config = ConfigDict(frozen=True)

    z1: float = Field(..., gt=0)
    z2: float = Field(..., gt=0)
    z7: float = Field(..., gt=0)
    z8: float = Field(..., gt=0)

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z7, self.z8], dtype=float)

    @classmethod
    def from_array(cls, values) -> "BoundaryLaw4":
        z1, z2, z7, z8 = (float(v) for v in values)
        return cls(z1=z1, z2=z2, z7=z7, z8=z8)


class Residual(BaseModel):
    model_config = ConfigDict(frozen=True)

    components: Tuple[float, float, float, float]
    max_norm: float = Field(..., ge=0)


class ReducedCase(BaseModel):
    """A supported reduction of system (4) to two variables."""
    model_config = ConfigDict(frozen=True)

    invariant_set: InvariantSet
    k: int
    i: int
    map_id: str
    substitution: str


class ReducedPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    y: float

    def swapped(self) -> "ReducedPoint":
        return ReducedPoint(x=self.y, y=self.x)

    def distance(self, other: "ReducedPoint") -> float:
        return max(abs(self.x - other.x), abs(self.y - other.y))


class RootList(BaseModel):
    model_config = ConfigDict(frozen=True)

    roots: List[float] = Field(default_factory=list)
    residuals: List[float] = Field(default_factory=list)
    bracket_width: float
    multiple: List[bool] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.roots)


class TwoCycle(BaseModel):
    model_config = ConfigDict(frozen=True)

    x1: float
    x2: float
    xi: float
    derivative: float


class BranchValues(BaseModel):
    """The four lambda-roots of f(lambda, x) = 0 at fixed x."""
    model_config = ConfigDict(frozen=True)

    x: float
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float
    admissible: Dict[str, bool] = Field(default_factory=dict)


class AdmissibilityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    lam: float
    complex_roots: bool
    lambda_acute1: Optional[float] = None
    lambda_acute2: Optional[float] = None
    lambda_breve: float
    cond34: bool
    cond35: bool
    cond35_either: bool
    sign32: int
    sign33: int

    @property
    def signs_match(self) -> bool:
        return self.sign32 == self.sign33 and self.sign32 != 0


class CriticalReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    case: str
    lambda_cr: Optional[float] = None
    x_star: Optional[float] = None
    convex: Optional[bool] = None
    s_minus: Optional[float] = None
    s_plus: Optional[float] = None
    lambda_minus: Optional[float] = None
    lambda_plus: Optional[float] = None


class Solution(BaseModel):
    model_config = ConfigDict(frozen=True)

    law: BoundaryLaw4
    reduced: ReducedPoint
    solution_class: SolutionClass
    residual: float
    tangent: bool = False


class SolutionSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: ModelParams
    invariant_set: InvariantSet
    solutions: List[Solution] = Field(default_factory=list)
    solver_count: int = 0
    oracle_count: int = 0
    oracle_agrees: bool = True

    @property
    def n_ti(self) -> int:
        return sum(1 for s in self.solutions if s.solution_class == SolutionClass.TI)

    @property
    def n_wp(self) -> int:
        return sum(1 for s in self.solutions if s.solution_class == SolutionClass.WP)

    @property
    def tangent(self) -> bool:
        return any(s.tangent for s in self.solutions)


class BifurcationRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    lam: float
    n_total: int
    n_ti: int
    n_wp: int
    tangent: bool
    coordinates: List[ReducedPoint] = Field(default_factory=list)


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    evidence: Dict[str, Any] = Field(default_factory=dict)


class TheoremReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    theorem_id: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)
