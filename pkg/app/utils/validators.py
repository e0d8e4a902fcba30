"""
Validation utilities for the Semiannulus Regularity Toolkit.
Provides predicates for numerical inputs and helpers that raise on bad data.
"""

import math
from typing import Iterable, Sequence

from app.utils.errors import BadParams, ValidationError

UNIT_TOL = 1e-12


def is_finite_positive(value: float) -> bool:
    """
    Check that a value is a finite, strictly positive real.

    Args:
        value: Number to check

    Returns:
        bool: True if 0 < value < inf
    """
    return isinstance(value, (int, float)) and math.isfinite(value) and value > 0


def is_unit(value: complex, tol: float = UNIT_TOL) -> bool:
    """
    Check that a complex number lies on the unit circle.

    Args:
        value: Complex number to check
        tol: Allowed deviation of |value| from 1

    Returns:
        bool: True if ||value| - 1| <= tol
    """
    return abs(abs(value) - 1.0) <= tol


def is_strictly_monotone(values: Sequence[float]) -> bool:
    """Check that a sequence is strictly increasing or strictly decreasing."""
    if len(values) < 2:
        return True
    diffs = [b - a for a, b in zip(values, values[1:])]
    return all(d > 0 for d in diffs) or all(d < 0 for d in diffs)


def validate_radii(inner: float, outer: float, name: str = "radii") -> None:
    """
    Validate a pair of radii 0 < inner < outer < inf.

    Args:
        inner: Inner radius
        outer: Outer radius
        name: Label used in the error message

    Raises:
        ValidationError: If the radii are out of order or not positive
    """
    if not (is_finite_positive(inner) and is_finite_positive(outer)):
        raise ValidationError(f"{name}: radii must be finite and positive, got ({inner}, {outer})")
    if not inner < outer:
        raise ValidationError(f"{name}: need inner < outer, got ({inner}, {outer})")


def validate_sector(sector) -> None:
    """Validate an angular sector 0 <= theta1 < theta2 <= pi."""
    if sector is None:
        return
    theta1, theta2 = sector
    if not (0.0 <= theta1 < theta2 <= math.pi):
        raise ValidationError(f"sector must satisfy 0 <= theta1 < theta2 <= pi, got {sector}")


def validate_interval(interval: Sequence[float]) -> None:
    """Validate a closed interval [a, b] with a <= b."""
    if len(interval) != 2:
        raise ValidationError(f"interval must have two endpoints, got {interval}")
    a, b = interval
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise ValidationError(f"interval must be finite with a <= b, got {interval}")


def validate_schedule(schedule: Sequence[float], min_terms: int = 4) -> None:
    """
    Validate a probe schedule: at least min_terms terms, strictly monotone.

    Raises:
        ValidationError: If the schedule is too short or not monotone
    """
    if len(schedule) < min_terms:
        raise ValidationError(f"schedule needs at least {min_terms} terms, got {len(schedule)}")
    if not is_strictly_monotone(list(schedule)):
        raise ValidationError("schedule must be strictly monotone")


def require_params(name: str, params: dict, required: Iterable[str]) -> None:
    """
    Check that a named builtin received all required parameters.

    Raises:
        BadParams: If a parameter is missing
    """
    missing = [key for key in required if key not in params]
    if missing:
        raise BadParams(f"{name}: missing parameters {missing}")
