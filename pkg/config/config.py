"""
Configuration settings for the Semiannulus Regularity Toolkit.
Handles numerical tolerances, schedule defaults and run options.
"""

import os
from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Toolkit settings loaded from environment variables.
    Using Pydantic's BaseSettings gives validation and type checking for free.
    """
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    # Application settings
    APP_NAME: str = "Semiannulus Regularity Toolkit"
    VERSION: str = "1.0.0"
    LOG_LEVEL: str = "WARNING"

    # Beltrami fields
    CLIP_EPSILON: float = 1e-9

    # Quadrature engine
    QUAD_ABS_TOL: float = 1e-7
    QUAD_REL_TOL: float = 1e-6
    QUAD_MAX_CELLS: int = 2 ** 20
    QUAD_MIN_LEVELS: int = 2
    QUAD_CHUNK_ROWS: int = 256

    # Limit probes and schedules
    CAUCHY_TOL: float = 1e-4
    DIVERGE_THRESHOLD: float = 1e3
    SCHEDULE_LEVELS: int = 24
    CARLESON_DIVERGE_THRESHOLD: float = 10.0
    CARLESON_X_WINDOW: float = 1.0
    CARLESON_SAMPLES: int = 257
    CARLESON_X_SAMPLES: int = 65
    ETA_REFINE_TOL: float = 0.05
    OMEGA_NODES: int = 16

    # Certificates
    T_GRID_POINTS: int = 33
    LIPSCHITZ_M_CAP: float = 10.0
    INFINITY_TOL: float = 1e-2
    INFINITY_LEVELS: int = 12
    EXTENSION_MIN_SLOPE: float = 0.5
    EXTENSION_LEVELS: int = 10
    EXTENSION_CELLS: int = 64
    EXTENSION_CELLS_PER_LOG: int = 8
    EXTENSION_CAUCHY_TOL: float = 1e-2
    FIT_RESIDUAL_MAX: float = 0.05

    # Modulus engine
    CG_RTOL: float = 1e-10
    CG_MAXITER: int = 20000
    MESH_INSET: float = 1e-3

    # Bounds
    DIAMETER_SAMPLES: int = 4096

    # Run settings
    THREADS: int = 0
    SEED: int = 0

    def worker_count(self) -> int:
        """Number of worker threads, 0 meaning all available cores."""
        return self.THREADS if self.THREADS > 0 else (os.cpu_count() or 1)


_scoped: Optional[Settings] = None


@lru_cache()
def _environment_settings() -> Settings:
    """
    Get cached settings instance.
    Using lru_cache ensures we only create one instance of Settings.
    """
    return Settings()


def get_settings() -> Settings:
    """The settings of the active run scope, else the cached environment settings."""
    return _scoped if _scoped is not None else _environment_settings()


def activate_settings(settings: Optional[Settings]) -> Optional[Settings]:
    """
    Make settings the instance get_settings returns, in every thread.

    None falls back to the environment settings. Returns the instance it replaces.
    """
    global _scoped
    previous, _scoped = _scoped, settings
    return previous


def clear_settings_cache() -> None:
    """Drop the cached environment settings so the next call rereads the environment."""
    _environment_settings.cache_clear()
