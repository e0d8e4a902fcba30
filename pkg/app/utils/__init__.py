"""
Utilities package.
This package contains validation helpers and the error hierarchy.
"""

from .validators import (
    is_finite_positive,
    is_unit,
    is_strictly_monotone,
    validate_radii,
    validate_sector,
    validate_interval,
    validate_schedule,
    require_params,
)

__all__ = [
    'is_finite_positive',
    'is_unit',
    'is_strictly_monotone',
    'validate_radii',
    'validate_sector',
    'validate_interval',
    'validate_schedule',
    'require_params',
]
