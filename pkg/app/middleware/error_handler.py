"""
Error handling middleware for the Semiannulus Regularity Toolkit.
Maps toolkit exceptions to process exit codes and error documents.
"""

import logging
from typing import Any, Callable, Dict, Tuple

from pydantic import ValidationError as PydanticValidationError

from app.utils.errors import ToolkitError, ValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0


def error_document(exc: ToolkitError) -> Dict[str, Any]:
    """Serializable description of a toolkit error."""
    return {
        "type": type(exc).__name__,
        "category": "numerical" if exc.exit_code == 3 else "validation",
        "detail": exc.detail,
        "exit_code": exc.exit_code,
    }


def guarded(action: Callable[[], Any]) -> Tuple[int, Any]:
    """
    Run an action, converting toolkit errors into exit codes.

    Model validation failures raised by pydantic count as validation errors.

    Args:
        action: Zero-argument callable

    Returns:
        tuple: (exit code, action result or the ToolkitError raised)
    """
    try:
        return EXIT_OK, action()
    except PydanticValidationError as exc:
        error = ValidationError(str(exc.errors()[0]["msg"]) if exc.errors() else str(exc))
        logger.error("ValidationError: %s", error.detail)
        return error.exit_code, error
    except ToolkitError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.detail)
        return exc.exit_code, exc
