"""
Beltrami field model for the Semiannulus Regularity Toolkit.
Defines the coefficient object every integral consumes and the per-point
dilatation sample.
"""

import enum
from typing import Callable, Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.utils.errors import NonFiniteValue


class Domain(str, enum.Enum):
    """Enumeration of the two model domains."""
    UPPER_HALF_PLANE = "upper_half_plane"
    UNIT_DISK = "unit_disk"


def in_domain(domain: Domain, z) -> np.ndarray:
    """Boolean mask of points of z lying in the open domain."""
    z = np.asarray(z, dtype=complex)
    if domain is Domain.UPPER_HALF_PLANE:
        return z.imag > 0
    return np.abs(z) < 1


class BeltramiField(BaseModel):
    """
    A Beltrami coefficient mu on the upper half-plane or the unit disk.

    The evaluator is a pure, vectorised function of a complex numpy array.
    Values are clipped radially to |mu| <= 1 - clip_epsilon on evaluation;
    a NaN or infinite value is an error, never clipped.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    domain: Domain
    evaluator: Callable[[np.ndarray], np.ndarray]
    clip_epsilon: float = Field(default=1e-9, gt=0.0, lt=0.5)
    label: str = "field"
    params: Dict[str, float] = Field(default_factory=dict)

    @field_validator("params")
    @classmethod
    def _real_params(cls, value: Dict[str, float]) -> Dict[str, float]:
        return {key: float(val) for key, val in value.items()}

    def evaluate(self, z) -> Tuple[np.ndarray, np.ndarray]:
        """
        Evaluate mu with clipping.

        Args:
            z: Complex point or array of points

        Returns:
            tuple: (clipped mu values, boolean mask of clipped points)

        Raises:
            NonFiniteValue: If the evaluator returns NaN or infinity anywhere
        """
        z = np.asarray(z, dtype=complex)
        mu = np.broadcast_to(np.asarray(self.evaluator(z), dtype=complex), z.shape).copy()
        bad = ~np.isfinite(mu)
        if np.any(bad):
            first = complex(z[bad].flat[0])
            raise NonFiniteValue(f"{self.label}: non-finite mu at {first!r} ({int(np.count_nonzero(bad))} points)",
                                 context={"point": [first.real, first.imag]})
        modulus = np.abs(mu)
        bound = 1.0 - self.clip_epsilon
        clipped = modulus > bound
        if np.any(clipped):
            mu[clipped] *= bound / modulus[clipped]
        return mu, clipped

    def __call__(self, z) -> np.ndarray:
        return self.evaluate(z)[0]

    def negated(self) -> "BeltramiField":
        """The field -mu, used for D_{-mu} and Q_{-mu}."""
        evaluator = self.evaluator
        return self.model_copy(update={
            "evaluator": lambda z: -np.asarray(evaluator(z), dtype=complex),
            "label": f"-({self.label})",
        })


class DilatationSample(BaseModel):
    """Directional and maximal dilatation of mu at one point."""
    model_config = ConfigDict(frozen=True)

    z: complex
    z0: complex
    mu: complex
    K_value: float = Field(ge=1.0)
    D_value: float = Field(gt=0.0)
    D_neg_value: float = Field(gt=0.0)
    clipped: bool = False
