"""
Gallery task.
Evaluates a gallery map, its closed-form Beltrami coefficient and the
finite-difference Wirtinger check at scenario points.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.middleware.run_context import RunContext
from app.models.field import BeltramiField, Domain
from app.models.scenario import TaskKind
from app.routes.router import TaskOutput, TaskRouter, point
from app.services.gallery_service import GalleryService

router = TaskRouter()


class GalleryParams(BaseModel):
    """Parameters of the gallery task."""
    model_config = ConfigDict(extra="forbid")

    name: str
    params: Dict[str, float] = Field(default_factory=dict)
    domain: Optional[Domain] = None
    points: List[Tuple[float, float]] = Field(default_factory=list)
    h: float = Field(default=1e-5, gt=0.0)


def evaluate_map(name: str, map_params: Dict[str, float], domain: Optional[Domain],
                 points: List[complex], h: float) -> List[dict]:
    """Rows of f(z), the closed-form mu and the finite-difference mu at each point."""
    named = GalleryService.gallery_map(name, map_params, domain)
    rows = []
    for z in points:
        image = complex(np.asarray(named(np.array([z])))[0])
        check = GalleryService.wirtinger_check(named, z, h)
        rows.append({
            "x": z.real, "y": z.imag, "f_re": image.real, "f_im": image.imag,
            "mu_fd_re": check.mu_fd.real, "mu_fd_im": check.mu_fd.imag,
            "mu_re": check.mu_closed.real if check.mu_closed is not None else None,
            "mu_im": check.mu_closed.imag if check.mu_closed is not None else None,
            "error": check.error,
        })
    return rows


@router.task(TaskKind.GALLERY, GalleryParams)
def run_gallery(params: GalleryParams, field: Optional[BeltramiField], context: RunContext) -> TaskOutput:
    """The map's listing entry and one row per point."""
    rows = evaluate_map(params.name, params.params, params.domain, [point(p) for p in params.points], params.h)
    document = {"map": params.name, "listing": GalleryService.listing()[params.name], "points": rows}
    return TaskOutput(document=document, rows=rows)
