"""
Shared fixtures for the toolkit tests.
"""

import pytest

from app.models.quadrature import QuadratureOptions
from config.config import clear_settings_cache


@pytest.fixture(autouse=True)
def fresh_settings():
    """Clear the settings cache around every test."""
    clear_settings_cache()
    yield
    clear_settings_cache()


@pytest.fixture
def fast_options():
    """Quadrature options with a small cell cap."""
    return QuadratureOptions.from_settings(max_cells=2 ** 14)


@pytest.fixture
def short_schedule():
    """Eight dyadic radii below 1."""
    return [2.0 ** (-k) for k in range(1, 9)]
