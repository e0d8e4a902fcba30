"""
Bounds-fuzz task.
Randomised campaigns for the diameter bound and the round-subannulus lemma.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.middleware.run_context import RunContext
from app.models.field import BeltramiField
from app.models.scenario import TaskKind
from app.routes.router import TaskOutput, TaskRouter
from app.services.bounds_service import CONSTANTS, BoundsService
from app.utils.errors import ToolkitError

router = TaskRouter()


class BoundsFuzzParams(BaseModel):
    """Parameters of the bounds-fuzz task."""
    model_config = ConfigDict(extra="forbid")

    campaign: str = Field(default="disk", pattern="^(disk|round_subannulus)$")
    count: int = Field(default=100, ge=1)
    resolution: int = Field(default=32, ge=8)
    samples: Optional[int] = Field(default=None, ge=16)


def _campaign_document(campaign: str, rows: List) -> dict:
    if campaign == "disk":
        failures = sum(row.violated for row in rows)
        margins = [row.margin for row in rows]
    else:
        failures = sum(row.slack < 0 for row in rows)
        margins = [row.slack for row in rows]
    return {
        "campaign": campaign,
        "constants": CONSTANTS.model_dump(),
        "violations": failures,
        "worst_margin": min(margins) if margins else None,
        "rows": [row.model_dump() for row in rows],
    }


@router.task(TaskKind.BOUNDS_FUZZ, BoundsFuzzParams)
def run_bounds_fuzz(params: BoundsFuzzParams, field: Optional[BeltramiField], context: RunContext) -> TaskOutput:
    """One row per random configuration; the seed comes from the run settings."""
    seed = context.settings.SEED
    try:
        if params.campaign == "disk":
            rows = BoundsService.fuzz_disk_bound(params.count, seed, params.resolution, params.samples)
        else:
            rows = BoundsService.round_subannulus_campaign(params.count, seed)
    except ToolkitError as exc:
        partial = _campaign_document(params.campaign, exc.partial)
        context.keep_partial(partial, partial["rows"])
        raise
    document = _campaign_document(params.campaign, rows)
    if document["violations"]:
        context.warn(f"{document['violations']} of {len(rows)} configurations violate the bound")
    return TaskOutput(document=document, rows=document["rows"])
