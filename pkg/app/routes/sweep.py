"""
Sweep task.
Tabulates a quantity over (t, r) pairs for external plotting.
"""

import enum
from typing import List, Optional

from pydantic import ConfigDict, Field, model_validator

from app.middleware.run_context import RunContext
from app.models.field import BeltramiField
from app.models.quadrature import KernelKind
from app.models.scenario import TaskKind
from app.models.semiannulus import SemiannulusSpec
from app.routes.router import QuadratureParams, TaskOutput, TaskRouter
from app.services.quadrature_service import QuadratureService
from app.utils.concurrency import map_settled
from app.utils.errors import ToolkitError

router = TaskRouter()


class SweepQuantity(str, enum.Enum):
    """Quantities a sweep can tabulate."""
    Q_RATIO = "q_ratio"
    HOLDER_MEAN = "holder_mean"
    KERNEL = "kernel"


class SweepParams(QuadratureParams):
    """
    Parameters of the sweep task.

    Rows are (t, r) pairs for t in t_values and r on R 2^{-k}, k = 1..levels,
    unless an explicit schedule is given. Q and kernel rows integrate over
    A(t; r, R) ∩ H; Hölder rows evaluate omega(t; r).
    """
    model_config = ConfigDict(extra="forbid")

    quantity: SweepQuantity = SweepQuantity.Q_RATIO
    kernel: KernelKind = KernelKind.D_PLUS_MINUS_ONE
    t_values: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    R: float = Field(default=1.0, gt=0.0)
    levels: int = Field(default=8, ge=1)
    schedule: Optional[List[float]] = None

    @model_validator(mode="after")
    def _radii_below_R(self) -> "SweepParams":
        if self.schedule is not None and not all(0 < r < self.R for r in self.schedule):
            raise ValueError("schedule radii must lie in (0, R)")
        return self

    def radii(self) -> List[float]:
        if self.schedule is not None:
            return list(self.schedule)
        return [self.R * 2.0 ** (-k) for k in range(1, self.levels + 1)]


@router.task(TaskKind.SWEEP, SweepParams, needs_field=True)
def run_sweep(params: SweepParams, field: Optional[BeltramiField], context: RunContext) -> TaskOutput:
    """One row per (t, r) pair, in t-major order; a failed pair leaves the others in the artifact."""
    options = params.quadrature_options()
    jobs = [(t, r) for t in params.t_values for r in params.radii()]

    def evaluate(job):
        t, r = job
        if params.quantity is SweepQuantity.Q_RATIO:
            return QuadratureService.q_modulus_ratio(field, t, r, params.R, options)
        if params.quantity is SweepQuantity.HOLDER_MEAN:
            return QuadratureService.holder_mean(field, t, r, options=options)
        return QuadratureService.annulus_integral(field, SemiannulusSpec.half_plane(t, r, params.R),
                                                  params.kernel, options)

    results, failure = map_settled(evaluate, jobs, catch=(ToolkitError,))
    rows = []
    for (t, r), result in zip(jobs, results):
        if result is None:
            continue
        for message in result.warnings:
            context.warn(message)
        rows.append({"t": t, "r": r, "value": result.value, "abs_error_estimate": result.abs_error_estimate,
                     "converged": result.converged})
    document = {"quantity": params.quantity.value, "rows": rows}
    if params.quantity is SweepQuantity.KERNEL:
        document["kernel"] = params.kernel.value
    if failure is not None:
        context.keep_partial(document, rows)
        raise failure
    return TaskOutput(document=document, rows=rows)
