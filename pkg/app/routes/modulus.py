"""
Modulus task.
Meshes the image of a canonical semiannulus and reports its discrete modulus.
"""

from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.middleware.run_context import RunContext
from app.models.field import BeltramiField, Domain
from app.models.scenario import TaskKind
from app.routes.router import RegionParams, TaskOutput, TaskRouter
from app.services.gallery_service import GalleryService
from app.services.modulus_service import ModulusService

router = TaskRouter()


class ModulusParams(BaseModel):
    """Parameters of the modulus task; map defaults to the identity."""
    model_config = ConfigDict(extra="forbid")

    region: RegionParams
    map: Optional[str] = None
    map_params: Dict[str, float] = Field(default_factory=dict)
    n: int = Field(default=128, ge=8)
    m: int = Field(default=128, ge=8)
    grading: str = Field(default="uniform", pattern="^(uniform|mercator)$")
    inset: float = Field(default=0.0, ge=0.0)
    reflect: bool = False
    mesh_out: Optional[str] = None


@router.task(TaskKind.MODULUS, ModulusParams)
def run_modulus(params: ModulusParams, field: Optional[BeltramiField], context: RunContext) -> TaskOutput:
    """Discrete modulus of the image region, next to the canonical modulus of the region itself."""
    spec = params.region.to_spec()
    if params.map is None:
        label = "identity"

        def map_fn(z):
            return z
    else:
        domain = Domain.UNIT_DISK if params.region.kind == "disk" else Domain.UPPER_HALF_PLANE
        named = GalleryService.gallery_map(params.map, params.map_params, domain)
        label, map_fn = named.name, named.forward

    mesh = ModulusService.mesh_region(map_fn, spec, params.n, params.m, grading=params.grading,
                                      inset=params.inset, label=label)
    estimate = ModulusService.discrete_modulus(mesh)
    if params.mesh_out is not None:
        ModulusService.write_mesh(mesh, params.mesh_out)
    row = {
        "map": label, "n": params.n, "m": params.m,
        "value": estimate.value, "mod_primal": estimate.mod_primal, "mod_dual": estimate.mod_dual,
        "discrepancy": estimate.discrepancy, "relative_discrepancy": estimate.relative_discrepancy,
        "lambda_joining": estimate.lambda_joining, "lambda_dividing": estimate.lambda_dividing,
        "canonical": ModulusService.canonical_modulus(spec) if spec.sector is None else None,
    }
    if estimate.relative_discrepancy > 0.01:
        context.warn(f"primal/dual discrepancy {estimate.relative_discrepancy:.3%} exceeds 1%")
    if params.reflect:
        row["reflected_ring"] = ModulusService.reflected_ring_modulus(mesh).value
    return TaskOutput(document={"modulus": row}, rows=[row])
