"""
Quadrature models for the Semiannulus Regularity Toolkit.
Defines kernel kinds, integration results, limit verdicts and engine options.
"""

import enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.models.field import Domain
from config.config import get_settings


class KernelKind(str, enum.Enum):
    """Integrands of the annulus integrals, as densities with respect to dxdy."""
    D_PLUS_MINUS_ONE = "DPlusMinusOne"
    D_MINUS_MINUS_ONE = "DMinusMinusOne"
    SQUARED_MODULUS = "SquaredModulus"
    REAL_QUADRATIC = "RealQuadratic"
    BRAKALOVA_JENKINS = "BrakalovaJenkins"
    INFINITY_KERNEL = "InfinityKernel"
    DISK_SQUARED = "DiskSquared"
    DISK_REAL = "DiskReal"

    @property
    def domain(self) -> Domain:
        if self in (KernelKind.DISK_SQUARED, KernelKind.DISK_REAL):
            return Domain.UNIT_DISK
        return Domain.UPPER_HALF_PLANE


class QuadratureResult(BaseModel):
    """Value of a singular annulus integral with its refinement diagnostics."""

    value: float
    abs_error_estimate: float = Field(ge=0.0)
    cells: int = Field(ge=0)
    clipped_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    converged: bool = True
    levels: int = 1
    warnings: List[str] = Field(default_factory=list)

    def scaled(self, factor: float, offset: float = 0.0) -> "QuadratureResult":
        """Affine image value*factor + offset with the error scaled accordingly."""
        return self.model_copy(update={
            "value": self.value * factor + offset,
            "abs_error_estimate": self.abs_error_estimate * abs(factor),
        })


class VerdictStatus(str, enum.Enum):
    """Outcome of a limit probe."""
    CONVERGES_TO = "ConvergesTo"
    DIVERGES = "Diverges"
    INCONCLUSIVE = "Inconclusive"


class LimitVerdict(BaseModel):
    """
    Verdict of a limit probe over a schedule.

    value is the limit when status is ConvergesTo; trace holds the
    (parameter, value) pairs in schedule order.
    """

    status: VerdictStatus
    value: Optional[float] = None
    trace: List[Tuple[float, float]] = Field(default_factory=list)
    slope: Optional[float] = None
    reliable: bool = True
    warnings: List[str] = Field(default_factory=list)

    @property
    def converges(self) -> bool:
        return self.status is VerdictStatus.CONVERGES_TO

    @property
    def diverges(self) -> bool:
        return self.status is VerdictStatus.DIVERGES

    def converges_to(self, target: float, tol: float) -> bool:
        """True when the verdict is ConvergesTo a value within tol of target."""
        return self.converges and abs(self.value - target) <= tol

    def label(self) -> str:
        if self.converges:
            return f"ConvergesTo({self.value:.10g})"
        return self.status.value


class OmegaIdentityResult(BaseModel):
    """Both sides of (Q - 1) log(R/r) = [omega(R) - omega(r)]/2 + int_r^R omega(s) ds/s."""

    lhs: float
    rhs: float
    omega_inner: float
    omega_outer: float
    omega_log_integral: float
    error_bound: float = Field(ge=0.0)
    converged: bool = True

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


class QuadratureOptions(BaseModel):
    """Tolerances and caps of the quadrature engine."""
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(gt=0.0)
    rel_tol: float = Field(ge=0.0)
    max_cells: int = Field(gt=0)
    min_levels: int = Field(ge=1)
    chunk_rows: int = Field(gt=0)

    @classmethod
    def from_settings(cls, **overrides) -> "QuadratureOptions":
        """Options from the current settings, with explicit overrides applied."""
        settings = get_settings()
        values = {
            "abs_tol": settings.QUAD_ABS_TOL,
            "rel_tol": settings.QUAD_REL_TOL,
            "max_cells": settings.QUAD_MAX_CELLS,
            "min_levels": settings.QUAD_MIN_LEVELS,
            "chunk_rows": settings.QUAD_CHUNK_ROWS,
        }
        values.update({key: val for key, val in overrides.items() if val is not None})
        return cls(**values)
