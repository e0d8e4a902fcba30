"""
Semiannulus specification model.
Canonical semiannuli A(t;r,R) ∩ H and T(zeta;r1,r2) with an optional sector.
"""

import enum
import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from app.models.field import Domain
from app.utils.validators import is_unit, validate_radii, validate_sector


class SpecKind(str, enum.Enum):
    """Which canonical family a spec belongs to."""
    HALF_PLANE = "half_plane"
    DISK = "disk"


class SemiannulusSpec(BaseModel):
    """
    A canonical semiannulus.

    HalfPlane{t, r, R} is A(t;r,R) ∩ H, where t = inf stands for A(0;1/R,1/r).
    Disk{zeta, r1, r2} is T(zeta;r1,r2) = {z in D: r1 <= |(z-zeta)/(z+zeta)| <= r2}.
    The optional sector restricts arg(z - t) (resp. arg u in the half-plane
    coordinate of the disk) to (theta1, theta2).
    """
    model_config = ConfigDict(frozen=True)

    kind: SpecKind
    t: Optional[float] = None
    r: Optional[float] = None
    R: Optional[float] = None
    zeta: Optional[complex] = None
    r1: Optional[float] = None
    r2: Optional[float] = None
    sector: Optional[Tuple[float, float]] = None

    @model_validator(mode="after")
    def _check(self) -> "SemiannulusSpec":
        if self.kind is SpecKind.HALF_PLANE:
            if self.t is None or self.r is None or self.R is None:
                raise ValueError("half-plane spec needs t, r, R")
            if math.isnan(self.t) or self.t == -math.inf:
                raise ValueError("t must be real or +inf")
            validate_radii(self.r, self.R, "half-plane semiannulus")
        else:
            if self.zeta is None or self.r1 is None or self.r2 is None:
                raise ValueError("disk spec needs zeta, r1, r2")
            if not is_unit(self.zeta, 1e-9):
                raise ValueError(f"zeta must have unit modulus, got {self.zeta}")
            validate_radii(self.r1, self.r2, "disk semiannulus")
        validate_sector(self.sector)
        return self

    @classmethod
    def half_plane(cls, t: float, r: float, R: float, sector=None) -> "SemiannulusSpec":
        """Spec of A(t;r,R) ∩ H."""
        return cls(kind=SpecKind.HALF_PLANE, t=t, r=r, R=R, sector=sector)

    @classmethod
    def disk(cls, zeta: complex, r1: float, r2: float, sector=None) -> "SemiannulusSpec":
        """Spec of T(zeta;r1,r2)."""
        return cls(kind=SpecKind.DISK, zeta=complex(zeta), r1=r1, r2=r2, sector=sector)

    @property
    def domain(self) -> Domain:
        return Domain.UPPER_HALF_PLANE if self.kind is SpecKind.HALF_PLANE else Domain.UNIT_DISK

    @property
    def at_infinity(self) -> bool:
        return self.kind is SpecKind.HALF_PLANE and self.t == math.inf

    @property
    def center(self) -> float:
        """Center of the log-polar coordinates (0 for t = inf and for disk specs)."""
        if self.kind is SpecKind.HALF_PLANE and not self.at_infinity:
            return float(self.t)
        return 0.0

    @property
    def inner(self) -> float:
        if self.kind is SpecKind.DISK:
            return float(self.r1)
        return 1.0 / self.R if self.at_infinity else float(self.r)

    @property
    def outer(self) -> float:
        if self.kind is SpecKind.DISK:
            return float(self.r2)
        return 1.0 / self.r if self.at_infinity else float(self.R)

    @property
    def log_ratio(self) -> float:
        return math.log(self.outer / self.inner)

    @property
    def theta_range(self) -> Tuple[float, float]:
        return self.sector if self.sector is not None else (0.0, math.pi)

