"""
Integrate task.
Kernel integrals, Q ratios, Hölder means, the omega identity and the
Carleson integral over scenario regions.
"""

import enum
from typing import List, Optional

from pydantic import ConfigDict, Field

from app.middleware.run_context import RunContext
from app.models.field import BeltramiField
from app.models.quadrature import KernelKind
from app.models.scenario import TaskKind
from app.routes.router import QuadratureParams, RegionParams, TaskOutput, TaskRouter
from app.services.quadrature_service import QuadratureService
from app.utils.errors import DomainMismatch, ToolkitError

router = TaskRouter()


class Quantity(str, enum.Enum):
    """What the integrate task evaluates per region."""
    KERNEL = "kernel"
    Q_RATIO = "q_ratio"
    HOLDER_MEAN = "holder_mean"
    OMEGA_IDENTITY = "omega_identity"
    CARLESON = "carleson"


class IntegrateParams(QuadratureParams):
    """Parameters of the integrate task."""
    model_config = ConfigDict(extra="forbid")

    quantity: Quantity = Quantity.KERNEL
    kernel: KernelKind = KernelKind.SQUARED_MODULUS
    regions: List[RegionParams] = Field(min_length=1)
    strict: bool = False


def _evaluate(params: IntegrateParams, field: BeltramiField, region: RegionParams) -> dict:
    options = params.quadrature_options()
    if params.quantity is Quantity.KERNEL:
        result = QuadratureService.annulus_integral(field, region.to_spec(), params.kernel, options,
                                                    strict=params.strict)
    elif region.kind == "disk":
        raise DomainMismatch(f"{params.quantity.value} is defined on half-plane regions only")
    elif params.quantity is Quantity.Q_RATIO:
        result = QuadratureService.q_modulus_ratio(field, region.t, region.r, region.R, options, region.sector)
    elif params.quantity is Quantity.HOLDER_MEAN:
        # omega(t; R) over the half-disk, with r as the inner cut-off
        result = QuadratureService.holder_mean(field, region.t, region.R, region.sector, region.r, options)
    elif params.quantity is Quantity.CARLESON:
        result = QuadratureService.carleson_integral(field, region.r, region.R)
    else:
        identity = QuadratureService.omega_identity(field, region.t, region.r, region.R, region.sector,
                                                    options=options)
        return {
            "value": identity.lhs, "rhs": identity.rhs, "difference": identity.difference,
            "abs_error_estimate": identity.error_bound, "converged": identity.converged,
            "omega_inner": identity.omega_inner, "omega_outer": identity.omega_outer,
        }
    return {
        "value": result.value, "abs_error_estimate": result.abs_error_estimate, "cells": result.cells,
        "clipped_fraction": result.clipped_fraction, "converged": result.converged,
        "warnings": list(result.warnings),
    }


@router.task(TaskKind.INTEGRATE, IntegrateParams, needs_field=True)
def run_integrate(params: IntegrateParams, field: Optional[BeltramiField], context: RunContext) -> TaskOutput:
    """One row per region; on failure the rows of the regions before it are kept."""
    rows = []
    for index, region in enumerate(params.regions):
        try:
            values = _evaluate(params, field, region)
        except ToolkitError:
            context.keep_partial({"results": rows}, rows)
            raise
        for message in values.pop("warnings", []):
            context.warn(message)
        rows.append({
            "index": index, "quantity": params.quantity.value, "kernel": params.kernel.value,
            "kind": region.kind, "t": region.t, "r": region.r, "R": region.R,
            "zeta_re": region.zeta[0], "zeta_im": region.zeta[1],
            **values,
        })
    return TaskOutput(document={"results": rows}, rows=rows)
