"""
Dilatation task.
Evaluates D_{mu,z0}, D_{-mu,z0} and K_mu at scenario points.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.middleware.run_context import RunContext
from app.models.field import BeltramiField
from app.models.scenario import TaskKind
from app.routes.router import TaskOutput, TaskRouter, point
from app.services.dilatation_service import DilatationService

router = TaskRouter()


class DilatationParams(BaseModel):
    """Parameters of the dilatation task."""
    model_config = ConfigDict(extra="forbid")

    z0: Tuple[float, float] = (0.0, 0.0)
    points: List[Tuple[float, float]] = Field(min_length=1)
    spherical_diameter: bool = False


@router.task(TaskKind.DILATATION, DilatationParams, needs_field=True)
def run_dilatation(params: DilatationParams, field: Optional[BeltramiField], context: RunContext) -> TaskOutput:
    """
    One row per point.

    Args:
        params: Base point and evaluation points
        field: Beltrami field
        context: Run context

    Returns:
        TaskOutput: Samples, and the spherical diameter of the points on request
    """
    z0 = point(params.z0)
    rows = []
    for pair in params.points:
        sample = DilatationService.directional_dilatation(field, z0, point(pair))
        rows.append({
            "x": sample.z.real, "y": sample.z.imag,
            "z0_re": z0.real, "z0_im": z0.imag,
            "mu_re": sample.mu.real, "mu_im": sample.mu.imag,
            "K": sample.K_value, "D": sample.D_value, "D_neg": sample.D_neg_value,
            "clipped": sample.clipped,
        })
    clipped = sum(row["clipped"] for row in rows)
    if clipped:
        context.warn(f"mu clipped at {clipped} of {len(rows)} points")
    document = {"samples": rows}
    if params.spherical_diameter:
        document["spherical_diameter"] = DilatationService.spherical_diameter(point(p) for p in params.points)
    return TaskOutput(document=document, rows=rows)
