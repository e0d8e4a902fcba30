"""
Scenario model for the Semiannulus Regularity Toolkit.
Defines the validated JSON scenario files the command line runs.
"""

import enum
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from app.models.field import Domain
from app.utils.errors import ValidationError

SCENARIO_SCHEMA_VERSION = 1


class TaskKind(str, enum.Enum):
    """Tasks a scenario can run."""
    DILATATION = "dilatation"
    INTEGRATE = "integrate"
    MODULUS = "modulus"
    BOUNDS_FUZZ = "bounds-fuzz"
    CERTIFY = "certify"
    GALLERY = "gallery"
    SWEEP = "sweep"


class OutputFormat(str, enum.Enum):
    """Artifact formats."""
    JSON = "json"
    CSV = "csv"


class FieldSpec(BaseModel):
    """
    Beltrami field of a scenario: a builtin or gallery name with parameters,
    or a sampled grid file.
    """
    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    params: Dict[str, float] = Field(default_factory=dict)
    grid: Optional[str] = None
    domain: Domain = Domain.UPPER_HALF_PLANE
    clip_epsilon: Optional[float] = Field(default=None, gt=0.0, lt=0.5)

    @model_validator(mode="after")
    def _one_source(self) -> "FieldSpec":
        if (self.name is None) == (self.grid is None):
            raise ValueError("field needs exactly one of 'name' or 'grid'")
        return self


class OutputSpec(BaseModel):
    """Where and how the artifact is written."""
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON


class Scenario(BaseModel):
    """
    A scenario file.

    params holds the task parameters; each task validates them against its
    own schema and the materialised values are echoed into the artifact.
    settings overrides Settings fields for the duration of the run.
    """
    model_config = ConfigDict(extra="forbid")

    version: int = SCENARIO_SCHEMA_VERSION
    task: TaskKind
    field: Optional[FieldSpec] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    output: OutputSpec = Field(default_factory=OutputSpec)
    seed: Optional[int] = None
    threads: Optional[int] = Field(default=None, ge=0)
    settings: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _supported_version(self) -> "Scenario":
        if self.version != SCENARIO_SCHEMA_VERSION:
            raise ValueError(f"unsupported scenario version {self.version}")
        return self

    @classmethod
    def load(cls, path) -> "Scenario":
        """
        Parse and validate a scenario file.

        Raises:
            ValidationError: If the file is missing, is not JSON or fails validation
        """
        try:
            document = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ValidationError(f"cannot read scenario {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scenario {path} is not valid JSON: {exc}") from exc
        return cls.parse_document(document)

    @classmethod
    def parse_document(cls, document: Any) -> "Scenario":
        try:
            return cls.model_validate(document)
        except PydanticValidationError as exc:
            raise ValidationError(f"invalid scenario: {_summarise(exc)}") from exc


def _summarise(exc: PydanticValidationError) -> str:
    parts: List[str] = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error["loc"]) or "<root>"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


def validate_task_params(model: type, params: Dict[str, Any]) -> BaseModel:
    """Validate a task's params against its schema, raising the toolkit ValidationError."""
    try:
        return model.model_validate(params)
    except PydanticValidationError as exc:
        raise ValidationError(f"invalid params: {_summarise(exc)}") from exc
