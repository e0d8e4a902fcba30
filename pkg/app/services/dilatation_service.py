"""
Dilatation service for the Semiannulus Regularity Toolkit.
Pointwise dilatation algebra and the spherical metric.
"""

import logging
from typing import Iterable, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from app.models.field import BeltramiField, DilatationSample, in_domain
from app.services.geometry import chordal_distance, stereographic
from app.utils.errors import DegenerateBase, DomainError, EmptyInput

logger = logging.getLogger(__name__)


def direction_factor(z0, z) -> np.ndarray:
    """conj(z - z0) / (z - z0) = e^{-2i arg(z - z0)}."""
    w = np.asarray(z, dtype=complex) - z0
    return np.conj(w) / w


def dilatation_arrays(mu, z0, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised D_{mu,z0}, D_{-mu,z0} and K_mu for already-evaluated mu values.

    Args:
        mu: Array of (clipped) Beltrami coefficient values at z
        z0: Base point
        z: Points, same shape as mu

    Returns:
        tuple: (D, D_neg, K) arrays
    """
    mu = np.asarray(mu, dtype=complex)
    rotated = mu * direction_factor(z0, z)
    modulus_sq = np.abs(mu) ** 2
    denom = 1.0 - modulus_sq
    d_plus = np.abs(1.0 - rotated) ** 2 / denom
    d_minus = np.abs(1.0 + rotated) ** 2 / denom
    modulus = np.sqrt(modulus_sq)
    k_value = (1.0 + modulus) / (1.0 - modulus)
    return d_plus, d_minus, k_value


class DilatationService:
    """
    Service class for pointwise dilatation quantities.
    Provides the directional dilatation and the spherical metric.
    """

    @staticmethod
    def directional_dilatation(mu: BeltramiField, z0: complex, z: complex) -> DilatationSample:
        """
        Directional dilatation D_{mu,z0}(z) = |1 - mu(z)(conj z - conj z0)/(z - z0)|^2 / (1 - |mu(z)|^2).

        Args:
            mu: Beltrami field
            z0: Base point (need not lie in the domain)
            z: Evaluation point in the field's domain

        Returns:
            DilatationSample: D for mu and -mu together with K_mu

        Raises:
            DomainError: If z lies outside the field's domain
            DegenerateBase: If z equals z0
        """
        z = complex(z)
        z0 = complex(z0)
        if not bool(in_domain(mu.domain, z)):
            raise DomainError(f"point {z} is outside {mu.domain.value}")
        if z == z0:
            raise DegenerateBase(f"evaluation point coincides with base point {z0}")

        value, clipped = mu.evaluate(np.array([z]))
        d_plus, d_minus, k_value = dilatation_arrays(value, z0, np.array([z]))
        return DilatationSample(
            z=z,
            z0=z0,
            mu=complex(value[0]),
            K_value=float(k_value[0]),
            D_value=float(d_plus[0]),
            D_neg_value=float(d_minus[0]),
            clipped=bool(clipped[0]),
        )

    @staticmethod
    def spherical_distance(z: complex, w: complex) -> float:
        """
        Chordal distance on the Riemann sphere; infinity is passed as None or inf.

        Returns:
            float: Distance in [0, 1]
        """
        return chordal_distance(z, w)

    @staticmethod
    def spherical_diameter(points: Iterable[complex]) -> float:
        """
        Largest pairwise chordal distance of a finite point sequence.

        Raises:
            EmptyInput: If the sequence is empty
        """
        pts = list(points)
        if not pts:
            raise EmptyInput("spherical_diameter needs at least one point")
        if len(pts) == 1:
            return 0.0
        return min(1.0, float(0.5 * np.max(pdist(stereographic(pts)))))
