"""Möbius and spherical-metric helpers shared by the disk operations."""

import math

import numpy as np


def cayley(u, zeta: complex = 1.0):
    """
    Map the upper half-plane onto the unit disk, u = 0 going to zeta.

    M(u) = zeta (1 + iu) / (1 - iu) satisfies |(M(u) - zeta)/(M(u) + zeta)| = |u|,
    so A(0;r1,r2) ∩ H is carried onto T(zeta;r1,r2).
    """
    u = np.asarray(u, dtype=complex)
    return zeta * (1 + 1j * u) / (1 - 1j * u)


def cayley_derivative(u, zeta: complex = 1.0):
    """M'(u) = 2i zeta / (1 - iu)^2."""
    u = np.asarray(u, dtype=complex)
    return 2j * zeta / (1 - 1j * u) ** 2


def cayley_inverse(z, zeta: complex = 1.0):
    """Inverse of cayley: u = -i (z - zeta) / (z + zeta)."""
    z = np.asarray(z, dtype=complex)
    return -1j * (z - zeta) / (z + zeta)


def disk_automorphism(z, a: complex = 0.0, phi: float = 0.0):
    """e^{i phi} (z - a) / (1 - conj(a) z), an isometry of the hyperbolic disk."""
    z = np.asarray(z, dtype=complex)
    return np.exp(1j * phi) * (z - a) / (1 - np.conj(a) * z)


def reflect_unit_circle(z):
    """Reflection z -> 1 / conj(z) across the unit circle."""
    z = np.asarray(z, dtype=complex)
    return 1.0 / np.conj(z)


def chordal_distance(z: complex, w: complex) -> float:
    """
    Spherical (chordal) distance |z - w| / sqrt((1 + |z|^2)(1 + |w|^2)).

    Either argument may be infinite; the limit 1 / sqrt(1 + |w|^2) is used.
    """
    z_inf = _is_infinite(z)
    w_inf = _is_infinite(w)
    if z_inf and w_inf:
        return 0.0
    if z_inf:
        return 1.0 / math.sqrt(1.0 + abs(w) ** 2)
    if w_inf:
        return 1.0 / math.sqrt(1.0 + abs(z) ** 2)
    return abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def _is_infinite(z) -> bool:
    return z is None or not (math.isfinite(complex(z).real) and math.isfinite(complex(z).imag))


def stereographic(points) -> np.ndarray:
    """
    Points of the extended plane on the unit sphere, as rows (X, Y, Z); infinity goes to (0, 0, 1).

    The Euclidean chord between two images is twice their chordal distance.
    """
    z = np.array([complex(math.inf) if p is None else complex(p) for p in points], dtype=complex)
    infinite = ~np.isfinite(z)
    z = np.where(infinite, 0.0, z)
    r = np.abs(z)
    big = r > 1.0
    # for |z| > 1 work with 1/r; |z|^2 is never formed
    inv = np.where(big, 1.0 / np.where(big, r, 1.0), 1.0)
    r_sq, s_sq = (r * inv) ** 2, np.where(big, inv ** 2, 1.0)
    planar = 2.0 * z * inv ** 2 / (r_sq + s_sq)
    height = (r_sq - s_sq) / (r_sq + s_sq)
    sphere = np.column_stack([planar.real, planar.imag, height])
    sphere[infinite] = (0.0, 0.0, 1.0)
    return sphere


def winding_number(polygon, point: complex) -> float:
    """Winding number of the closed polygon (last vertex joined to the first) about a point."""
    offsets = np.asarray(polygon, dtype=complex) - point
    closed = np.append(offsets, offsets[:1])
    return float(np.sum(np.angle(closed[1:] / closed[:-1])) / (2.0 * math.pi))
