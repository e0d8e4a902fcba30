"""
Task router for the Semiannulus Regularity Toolkit.
Registers scenario task handlers and dispatches scenarios to them.
"""

import logging
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

from pydantic import BaseModel, Field

from app.middleware.run_context import RunContext
from app.models.field import BeltramiField
from app.models.quadrature import QuadratureOptions
from app.models.scenario import Scenario, TaskKind, validate_task_params
from app.models.semiannulus import SemiannulusSpec
from app.services.field_service import FieldService
from app.utils.errors import BadParams, UnsupportedSpec

logger = logging.getLogger(__name__)


class TaskOutput(BaseModel):
    """
    What a task hands back to the artifact writer.

    document is the JSON body; rows are the CSV rows.
    """

    document: Dict[str, Any] = Field(default_factory=dict)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


Handler = Callable[[BaseModel, Optional[BeltramiField], RunContext], TaskOutput]


class TaskRouter:
    """Maps task kinds to handlers and their parameter schemas."""

    def __init__(self):
        self._routes: Dict[TaskKind, Tuple[Handler, Type[BaseModel], bool]] = {}

    def task(self, kind: TaskKind, params_model: Type[BaseModel], needs_field: bool = False):
        """Decorator registering a handler for a task kind."""
        def register(handler: Handler) -> Handler:
            self._routes[kind] = (handler, params_model, needs_field)
            return handler
        return register

    def include_router(self, other: "TaskRouter") -> None:
        self._routes.update(other._routes)

    @property
    def kinds(self) -> List[TaskKind]:
        return sorted(self._routes, key=lambda kind: kind.value)

    def resolve_params(self, scenario: Scenario) -> BaseModel:
        """The task's parameters validated with every default materialised."""
        if scenario.task not in self._routes:
            raise UnsupportedSpec(f"no handler for task '{scenario.task.value}'")
        _, params_model, _ = self._routes[scenario.task]
        return validate_task_params(params_model, scenario.params)

    def dispatch(self, scenario: Scenario, params: BaseModel, context: RunContext) -> TaskOutput:
        """Run the scenario's task handler."""
        handler, _, needs_field = self._routes[scenario.task]
        field = None
        context.scenario_field = scenario.field
        if scenario.field is not None:
            field = build_field(scenario)
        elif needs_field:
            raise BadParams(f"task '{scenario.task.value}' needs a field")
        logger.info("running task %s", scenario.task.value)
        return handler(params, field, context)


def build_field(scenario: Scenario) -> BeltramiField:
    """Construct the scenario's Beltrami field."""
    spec = scenario.field
    if spec.grid is not None:
        return FieldService.from_csv(spec.grid, domain=spec.domain, clip_epsilon=spec.clip_epsilon)
    params = dict(spec.params)
    if spec.name in ("zero", "constant", "radial_stretch") and spec.domain.value == "unit_disk":
        params.setdefault("domain", 1.0)
    return FieldService.builtin(spec.name, params, clip_epsilon=spec.clip_epsilon)


class RegionParams(BaseModel):
    """A semiannulus in task parameters."""

    kind: str = Field(default="half_plane", pattern="^(half_plane|disk)$")
    t: float = 0.0
    r: float = Field(default=0.01, gt=0.0)
    R: float = Field(default=1.0, gt=0.0)
    zeta: Tuple[float, float] = (1.0, 0.0)
    sector: Optional[Tuple[float, float]] = None

    def to_spec(self) -> SemiannulusSpec:
        """Build the spec; r and R play the roles of r1 and r2 for disk regions."""
        if self.kind == "disk":
            return SemiannulusSpec.disk(complex(*self.zeta), self.r, self.R, sector=self.sector)
        return SemiannulusSpec.half_plane(self.t, self.r, self.R, sector=self.sector)


def point(pair: Tuple[float, float]) -> complex:
    return complex(pair[0], pair[1])


class QuadratureParams(BaseModel):
    """Optional quadrature overrides shared by the integrating tasks."""

    max_cells: Optional[int] = Field(default=None, gt=0)
    abs_tol: Optional[float] = Field(default=None, gt=0.0)
    rel_tol: Optional[float] = Field(default=None, ge=0.0)

    def quadrature_options(self) -> QuadratureOptions:
        return QuadratureOptions.from_settings(max_cells=self.max_cells, abs_tol=self.abs_tol,
                                               rel_tol=self.rel_tol)
