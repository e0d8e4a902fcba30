"""
Run context middleware for the Semiannulus Regularity Toolkit.
Applies per-run settings overrides and collects warnings logged while a
scenario executes.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

from pydantic import ValidationError as PydanticValidationError

from app.utils.errors import ValidationError
from config.config import Settings, activate_settings, get_settings

logger = logging.getLogger(__name__)


class WarningCollector(logging.Handler):
    """Logging handler keeping the messages of WARNING records from the toolkit's loggers."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages: List[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.messages.append(record.getMessage())


@dataclass
class RunContext:
    """State of one scenario run."""

    overrides: Dict[str, Any]
    warnings: List[str] = field(default_factory=list)
    collector: WarningCollector = field(default_factory=WarningCollector)
    scenario_field: Optional[Any] = None
    partial_document: Dict[str, Any] = field(default_factory=dict)
    partial_rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def settings(self) -> Settings:
        return get_settings()

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def keep_partial(self, document: Dict[str, Any], rows: List[Dict[str, Any]]) -> None:
        """Record what a failing task finished, for the artifact written on failure."""
        self.partial_document = dict(document)
        self.partial_rows = list(rows)

    def collected_warnings(self) -> List[str]:
        """Unique warnings in sorted order, independent of thread scheduling."""
        return sorted(set(self.warnings) | set(self.collector.messages))


@contextmanager
def run_scope(overrides: Dict[str, Any]) -> Iterator[RunContext]:
    """
    Execute a run under settings overrides, capturing toolkit warnings.

    The overrides build one Settings instance that get_settings() returns,
    from every thread, until the scope closes.

    Raises:
        ValidationError: If an override names no Settings field or fails validation
    """
    unknown = sorted(set(overrides) - set(Settings.model_fields))
    if unknown:
        raise ValidationError(f"unknown settings {unknown}")
    try:
        scoped = Settings(**overrides)
    except PydanticValidationError as exc:
        raise ValidationError(f"invalid settings override: {exc.errors()[0]['msg']}") from exc
    toolkit_logger = logging.getLogger("app")
    previous_level = toolkit_logger.level
    context = RunContext(overrides=dict(overrides))
    previous = activate_settings(scoped)
    try:
        if toolkit_logger.getEffectiveLevel() > logging.WARNING:
            toolkit_logger.setLevel(logging.WARNING)
        toolkit_logger.addHandler(context.collector)
        logger.debug("run scope opened with overrides %s", sorted(overrides))
        yield context
    finally:
        toolkit_logger.removeHandler(context.collector)
        toolkit_logger.setLevel(previous_level)
        activate_settings(previous)
