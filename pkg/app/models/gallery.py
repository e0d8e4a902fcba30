"""
Gallery map model.
Explicit homeomorphisms used as ground-truth maps and test fixtures.
"""

from typing import Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.models.field import Domain


class NamedMap(BaseModel):
    """
    A named homeomorphism of the half-plane or the disk.

    forward and the optional evaluators are vectorised over complex arrays.
    For half-plane maps, boundary takes real t; for disk maps it takes the
    angle theta of e^{i theta}.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    domain: Domain
    forward: Callable[[np.ndarray], np.ndarray]
    boundary: Optional[Callable[[np.ndarray], np.ndarray]] = None
    mu_closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: Dict[str, float] = Field(default_factory=dict)

    def __call__(self, z) -> np.ndarray:
        return self.forward(np.asarray(z, dtype=complex))


class WirtingerResult(BaseModel):
    """Finite-difference Wirtinger derivatives of a map at one point."""
    model_config = ConfigDict(frozen=True)

    z: complex
    h: float
    fz: complex
    fzbar: complex
    mu_fd: complex
    mu_closed: Optional[complex] = None

    @property
    def error(self) -> Optional[float]:
        """|mu_fd - mu_closed| when a closed form exists."""
        if self.mu_closed is None:
            return None
        return abs(self.mu_fd - self.mu_closed)
