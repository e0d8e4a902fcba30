"""
Field service for the Semiannulus Regularity Toolkit.
Handles construction of Beltrami fields by name, sampled-grid ingestion and
the transfer of disk fields to the half-plane.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Dict, Optional

import numpy as np
from scipy.spatial import cKDTree

from app.models.field import BeltramiField, Domain
from app.services.gallery_service import GalleryService
from app.services.geometry import cayley, cayley_derivative
from app.utils.errors import BadParams, EmptyInput, UnknownName
from app.utils.validators import require_params
from config.config import get_settings

logger = logging.getLogger(__name__)


def _domain_param(params: Dict[str, float], default: Domain = Domain.UPPER_HALF_PLANE) -> Domain:
    # domain is passed numerically: 0 = upper half-plane, 1 = unit disk
    if "domain" not in params:
        return default
    return Domain.UNIT_DISK if params["domain"] >= 0.5 else Domain.UPPER_HALF_PLANE


def _zero(params):
    return _domain_param(params), lambda z: np.zeros_like(z)


def _constant(params):
    value = complex(params.get("re", 0.0), params.get("im", 0.0))
    if abs(value) >= 1:
        raise BadParams(f"constant: |mu| must be < 1, got {abs(value)}")
    return _domain_param(params), lambda z: np.full_like(z, value)


def _radial_stretch(params):
    require_params("radial_stretch", params, ("K",))
    K = params["K"]
    if not K > 0:
        raise BadParams(f"radial_stretch: K must be positive, got {K}")
    named = GalleryService.gallery_map("radial_stretch", {"K": K}, _domain_param(params))
    return named.domain, named.mu_closed_form


def _strip_ramp(params):
    # mu(x + iy) = y on the strip 0 < y < 1, zero above
    def evaluator(z):
        y = z.imag
        return np.where(y < 1.0, y, 0.0) + 0j
    return Domain.UPPER_HALF_PLANE, evaluator


def _bump(params):
    require_params("bump", params, ("radius", "amplitude"))
    center = complex(params.get("center_re", 0.0), params.get("center_im", 0.0))
    radius = params["radius"]
    amplitude = params["amplitude"]
    if not (radius > 0 and 0 <= abs(amplitude) < 1):
        raise BadParams(f"bump: need radius > 0 and |amplitude| < 1, got {radius}, {amplitude}")

    def evaluator(z):
        q = np.abs(z - center) ** 2 / radius ** 2
        inside = q < 1.0
        safe = np.where(inside, q, 0.0)
        return np.where(inside, amplitude * np.exp(1.0 - 1.0 / (1.0 - safe)), 0.0) + 0j

    return _domain_param(params), evaluator


_BUILTINS = {
    "zero": _zero,
    "constant": _constant,
    "radial_stretch": _radial_stretch,
    "strip_ramp": _strip_ramp,
    "bump": _bump,
}


class SampledGrid:
    """Nearest-cell evaluator over scattered (x, y, mu) samples."""

    def __init__(self, points: np.ndarray, values: np.ndarray):
        if len(points) == 0:
            raise EmptyInput("sampled field has no samples")
        self.tree = cKDTree(points)
        self.values = values

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        query = np.column_stack([z.real.ravel(), z.imag.ravel()])
        _, index = self.tree.query(query)
        return self.values[index].reshape(z.shape)


class FieldService:
    """
    Service class for Beltrami field construction.
    Provides builtin fields, sampled fields and the disk-to-half-plane transfer.
    """

    @staticmethod
    def names() -> list:
        """Every name accepted by FieldService.builtin."""
        return sorted(set(_BUILTINS) | set(GalleryService.names()) | {"sampled"})

    @staticmethod
    def builtin(name: str, params: Optional[Dict[str, float]] = None,
                clip_epsilon: Optional[float] = None, path: Optional[str] = None) -> BeltramiField:
        """
        Build a Beltrami field by name.

        Args:
            name: Builtin or gallery name, or "sampled"
            params: Parameters of the builtin
            clip_epsilon: Clipping margin (defaults to CLIP_EPSILON)
            path: CSV file for the "sampled" field

        Returns:
            BeltramiField: The requested field

        Raises:
            UnknownName: If the name is not known
            BadParams: If parameters are missing or out of range
        """
        params = {key: float(val) for key, val in (params or {}).items()}
        epsilon = clip_epsilon if clip_epsilon is not None else get_settings().CLIP_EPSILON

        if name == "sampled":
            if path is None:
                raise BadParams("sampled: a CSV path is required")
            return FieldService.from_csv(path, domain=_domain_param(params), clip_epsilon=epsilon)

        if name in _BUILTINS:
            domain, evaluator = _BUILTINS[name](params)
        elif name in GalleryService.names():
            named = GalleryService.gallery_map(name, params)
            domain, evaluator = named.domain, named.mu_closed_form
        else:
            raise UnknownName(f"unknown field '{name}'; known: {FieldService.names()}")

        return BeltramiField(domain=domain, evaluator=evaluator, clip_epsilon=epsilon,
                             label=name, params=params)

    @staticmethod
    def from_csv(path: str, domain: Domain = Domain.UPPER_HALF_PLANE,
                 clip_epsilon: Optional[float] = None) -> BeltramiField:
        """
        Load a sampled field from a CSV of x, y, re, im rows.

        A header row is skipped when its first cell is not numeric.

        Raises:
            EmptyInput: If the file has no data rows
        """
        rows = []
        with Path(path).open(newline="") as handle:
            for record in csv.reader(handle):
                if not record:
                    continue
                try:
                    rows.append([float(cell) for cell in record[:4]])
                except ValueError:
                    continue
        data = np.asarray(rows, dtype=float).reshape(-1, 4)
        logger.info("Loaded %d samples from %s", len(data), path)
        grid = SampledGrid(data[:, :2], data[:, 2] + 1j * data[:, 3])
        epsilon = clip_epsilon if clip_epsilon is not None else get_settings().CLIP_EPSILON
        return BeltramiField(domain=domain, evaluator=grid, clip_epsilon=epsilon,
                             label=f"sampled:{Path(path).name}")

    @staticmethod
    def pullback_to_halfplane(mu: BeltramiField, zeta: complex = 1.0) -> BeltramiField:
        """
        Transfer a disk field to the half-plane through u -> M(u) = zeta(1+iu)/(1-iu).

        The transferred coefficient is mu(M(u)) conj(M'(u)) / M'(u); the boundary
        point zeta corresponds to u = 0.

        Raises:
            BadParams: If mu does not live on the unit disk
        """
        if mu.domain is not Domain.UNIT_DISK:
            raise BadParams("pullback_to_halfplane needs a unit-disk field")
        if not math.isclose(abs(zeta), 1.0, abs_tol=1e-9):
            raise BadParams(f"zeta must have unit modulus, got {zeta}")
        evaluator = mu.evaluator

        def pulled(u):
            derivative = cayley_derivative(u, zeta)
            return np.asarray(evaluator(cayley(u, zeta)), dtype=complex) * np.conj(derivative) / derivative

        return BeltramiField(domain=Domain.UPPER_HALF_PLANE, evaluator=pulled,
                             clip_epsilon=mu.clip_epsilon, label=f"pullback({mu.label})",
                             params=dict(mu.params))
