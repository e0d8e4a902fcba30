"""
Mesh and modulus models for the Semiannulus Regularity Toolkit.
Defines curvilinear quadrilateral meshes and discrete modulus estimates.
"""

import math
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.models.field import Domain


class CurvedQuadMesh(BaseModel):
    """
    Structured quadrilateral mesh of a semiannulus or ring.

    nodes[i, j] with i = 0..n across the region (the columns i = 0 and i = n
    are the sides) and j = 0..m along it (the rows j = 0 and j = m are the
    ends). A periodic mesh is a ring: row m repeats row 0 and the ends are
    identified.

    When chart is set, the mesh is curved: nodes = chart(parameters) on a
    rectangular grid of parameters w = s + i theta, and cell geometry comes
    from the chart itself rather than from straight edges between nodes.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: np.ndarray
    periodic: bool = False
    angular_span: float = math.pi
    provenance: str = ""
    domain: Optional[Domain] = None
    interior_anchor: Optional[complex] = None
    parameters: Optional[np.ndarray] = None
    chart: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @field_validator("nodes")
    @classmethod
    def _grid(cls, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=complex)
        if value.ndim != 2 or value.shape[0] < 2 or value.shape[1] < 2:
            raise ValueError(f"nodes must be an (n+1) x (m+1) grid, got shape {value.shape}")
        if not np.all(np.isfinite(value)):
            raise ValueError("mesh nodes must be finite")
        return value

    @property
    def curved(self) -> bool:
        return self.chart is not None and self.parameters is not None

    def straightened(self) -> "CurvedQuadMesh":
        """The same nodes with straight-edged cells."""
        return self.model_copy(update={"chart": None, "parameters": None})

    @property
    def n(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def m(self) -> int:
        return self.nodes.shape[1] - 1

    @property
    def side_a(self) -> np.ndarray:
        return self.nodes[0, :]

    @property
    def side_b(self) -> np.ndarray:
        return self.nodes[-1, :]

    @property
    def ends(self) -> tuple:
        return self.nodes[:, 0], self.nodes[:, -1]

    def side_distance(self) -> float:
        """Smallest node-to-node distance between the two sides."""
        gaps = np.abs(self.side_a[:, None] - self.side_b[None, :])
        return float(np.min(gaps))


class ModulusEstimate(BaseModel):
    """Discrete modulus from the two conjugate Dirichlet problems."""

    mod_primal: float = Field(ge=0.0)
    mod_dual: float = Field(ge=0.0)
    value: float
    discrepancy: float = Field(ge=0.0)
    lambda_joining: float
    lambda_dividing: float
    energy_sides: float
    energy_ends: float
    span: float = math.pi

    @classmethod
    def from_energies(cls, energy_sides: float, energy_ends: float,
                      span: float = math.pi) -> "ModulusEstimate":
        """Build the estimate from E_sides and E_ends."""
        primal = span / energy_sides
        dual = span * energy_ends
        value = 0.5 * (primal + dual)
        return cls(
            mod_primal=primal,
            mod_dual=dual,
            value=value,
            discrepancy=abs(primal - dual),
            lambda_joining=value / span,
            lambda_dividing=span / value,
            energy_sides=energy_sides,
            energy_ends=energy_ends,
            span=span,
        )

    @classmethod
    def collapsed(cls, span: float = math.pi) -> "ModulusEstimate":
        """Modulus 0 of a region whose two sides touch."""
        return cls(mod_primal=0.0, mod_dual=0.0, value=0.0, discrepancy=0.0, lambda_joining=0.0,
                   lambda_dividing=math.inf, energy_sides=math.inf, energy_ends=0.0, span=span)

    @property
    def relative_discrepancy(self) -> float:
        return self.discrepancy / self.value if self.value > 0 else 0.0
