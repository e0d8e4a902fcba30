"""
Certificate models for the Semiannulus Regularity Toolkit.
Defines regularity conclusions, condition verdicts and the certificate document.
"""

import enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from app.models.quadrature import LimitVerdict


class Conclusion(str, enum.Enum):
    """Strongest regularity a certificate establishes."""
    NOT_CERTIFIED = "NotCertified"
    CONTINUOUS_EXTENSION = "ContinuousExtension"
    DIFFERENTIABLE = "Differentiable"
    LOCALLY_LIPSCHITZ = "LocallyLipschitz"
    HOLDER = "Holder"


class ConditionName(str, enum.Enum):
    """Hypotheses a certificate can evaluate."""
    CARLESON = "Carleson"
    BRAKALOVA_JENKINS = "BrakalovaJenkins"
    COND1 = "Cond1"
    COND2 = "Cond2"
    LIPSCHITZ = "Lipschitz"
    HOLDER = "Holder"
    INFINITY = "Infinity"
    DISK_COND_I = "DiskCond_i"
    DISK_COND_II = "DiskCond_ii"
    EXTENSION = "Extension"


class ConditionVerdict(BaseModel):
    """Verdict of one condition: a limit verdict, a bound value, or both."""

    name: ConditionName
    verdict: Optional[LimitVerdict] = None
    bound: Optional[float] = None

    def label(self) -> str:
        if self.verdict is not None:
            return self.verdict.label()
        return f"{self.bound:.10g}" if self.bound is not None else "n/a"


class TraceRecord(BaseModel):
    """A named (parameter, value) trace, ready for plotting."""

    name: str
    parameter: str = "r"
    points: List[Tuple[float, float]] = Field(default_factory=list)


class DerivedConstants(BaseModel):
    """Constants derived while certifying."""

    g: Optional[float] = None
    M: Optional[float] = None
    alpha: Optional[float] = None


class RegularityCertificate(BaseModel):
    """
    Result of a certification run.

    input describes the field and the point t or interval I; grids holds the
    schedule and t-grid actually used.
    """

    input: Dict[str, Any] = Field(default_factory=dict)
    grids: Dict[str, Any] = Field(default_factory=dict)
    verdicts: List[ConditionVerdict] = Field(default_factory=list)
    traces: List[TraceRecord] = Field(default_factory=list)
    constants: DerivedConstants = Field(default_factory=DerivedConstants)
    conclusion: Conclusion = Conclusion.NOT_CERTIFIED
    warnings: List[str] = Field(default_factory=list)

    def verdict(self, name: ConditionName) -> Optional[LimitVerdict]:
        """The limit verdict recorded for a condition, if any."""
        for entry in self.verdicts:
            if entry.name is name:
                return entry.verdict
        return None

    def conclusion_label(self) -> str:
        """Conclusion as text, Holder carrying its exponent."""
        if self.conclusion is Conclusion.HOLDER and self.constants.alpha is not None:
            return f"Holder({self.constants.alpha:.6g})"
        return self.conclusion.value

    def to_document(self) -> Dict[str, Any]:
        """JSON document {input, grids, verdicts[], traces[], constants, conclusion, warnings[]}."""
        return {
            "input": self.input,
            "grids": self.grids,
            "verdicts": [
                {
                    "name": entry.name.value,
                    "status": entry.verdict.status.value if entry.verdict is not None else None,
                    "value": entry.verdict.value if entry.verdict is not None else None,
                    "slope": entry.verdict.slope if entry.verdict is not None else None,
                    "reliable": entry.verdict.reliable if entry.verdict is not None else None,
                    "bound": entry.bound,
                    "label": entry.label(),
                }
                for entry in self.verdicts
            ],
            "traces": [
                {"name": trace.name, "parameter": trace.parameter,
                 "points": [[p, v] for p, v in trace.points]}
                for trace in self.traces
            ],
            "constants": self.constants.model_dump(),
            "conclusion": self.conclusion_label(),
            "warnings": list(self.warnings),
        }


class BoundaryExponent(BaseModel):
    """Log-log fit of |f(t + h) - f(t)| against |h|."""

    alpha_hat: float
    deriv_hat: Optional[float] = None
    residual: float = Field(ge=0.0)
    poor_fit: bool = False
    trace: List[Tuple[float, float]] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
