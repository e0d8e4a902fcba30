"""
Gallery service for the Semiannulus Regularity Toolkit.
Builds the explicit example homeomorphisms together with their Beltrami
coefficients, and checks those coefficients by finite differences.
"""

import logging
import math
from typing import Dict, Optional

import numpy as np

from app.models.field import Domain, in_domain
from app.models.gallery import NamedMap, WirtingerResult
from app.utils.errors import BadParams, StencilOutOfDomain, UnknownName

logger = logging.getLogger(__name__)

QUARTER_PI = math.pi / 4


def _unit_direction(z: np.ndarray) -> np.ndarray:
    """z / conj(z), with the value 1 at the origin."""
    modulus = np.abs(z)
    safe = np.where(modulus > 0, z, 1.0)
    return np.where(modulus > 0, safe / np.conj(safe), 1.0)


# radial_stretch: f(z) = z |z|^{K-1}

def _radial_stretch(params: Dict[str, float], domain: Domain) -> NamedMap:
    K = params["K"]
    if not K > 0:
        raise BadParams(f"radial_stretch: K must be positive, got {K}")
    c = (K - 1.0) / (K + 1.0)

    def forward(z):
        return z * np.abs(z) ** (K - 1.0)

    def mu(z):
        return c * _unit_direction(z)

    if domain is Domain.UPPER_HALF_PLANE:
        def boundary(t):
            t = np.asarray(t, dtype=float)
            return np.sign(t) * np.abs(t) ** K
    else:
        def boundary(theta):
            return np.exp(1j * np.asarray(theta, dtype=float))

    return NamedMap(name="radial_stretch", domain=domain, forward=forward,
                    boundary=boundary, mu_closed_form=mu, params=dict(params))


# radial_twist: f(r e^{i theta}) = r exp i(theta - log(1 - r))

def _radial_twist(params: Dict[str, float], domain: Domain) -> NamedMap:
    def forward(z):
        rho = np.abs(z)
        return z * np.exp(-1j * np.log1p(-rho))

    def mu(z):
        rho = np.abs(z)
        a = rho / (2.0 * (1.0 - rho))
        return _unit_direction(z) * (1j * a) / (1.0 + 1j * a)

    return NamedMap(name="radial_twist", domain=Domain.UNIT_DISK, forward=forward,
                    boundary=None, mu_closed_form=mu, params=dict(params))


# prime_end_twist: f(r e^{i theta}) = r exp i pi (theta/pi)^{-log(1-r)} on the
# upper half, extended by f(conj z) = conj f(z)

def _prime_end_upper(z):
    rho = np.abs(z)
    theta = np.abs(np.angle(z))
    power = -np.log1p(-rho)
    return rho * np.exp(1j * math.pi * (theta / math.pi) ** power)


def _prime_end_mu_upper(z):
    rho = np.abs(z)
    theta = np.abs(np.angle(z))
    power = -np.log1p(-rho)
    # floor keeps the theta = 0 axis finite
    ratio = np.maximum(theta / math.pi, np.finfo(float).tiny)
    with np.errstate(over="ignore", invalid="ignore"):
        d_theta = power * ratio ** (power - 1.0)
        d_rho = math.pi * ratio ** power * np.log(ratio) / (1.0 - rho)
    num = 1.0 - d_theta + 1j * rho * d_rho
    den = 1.0 + d_theta + 1j * rho * d_rho
    return np.exp(2j * theta) * num / den


def _prime_end_twist(params: Dict[str, float], domain: Domain) -> NamedMap:
    # seam at theta in {0, pi}: the upper (theta -> 0+) branch is taken
    def forward(z):
        upper = np.angle(z) >= 0
        value = _prime_end_upper(z)
        return np.where(upper, value, np.conj(value))

    def mu(z):
        upper = np.angle(z) >= 0
        value = _prime_end_mu_upper(z)
        return np.where(upper, value, np.conj(value))

    def boundary(theta):
        theta = np.asarray(theta, dtype=float)
        wrapped = np.angle(np.exp(1j * theta))
        return np.where(np.abs(wrapped) < math.pi, 1.0 + 0j, -1.0 + 0j)

    return NamedMap(name="prime_end_twist", domain=Domain.UNIT_DISK, forward=forward,
                    boundary=boundary, mu_closed_form=mu, params=dict(params))


# tanh_strip: tanh(pi/4 z) on 0 < y <= 1, y tanh(pi/4 (x + i)) above

def _sech_squared(w: np.ndarray) -> np.ndarray:
    """sech(w)^2 as 4u / (1 + u)^2, with u = exp(-2w) or exp(2w) so that |u| <= 1."""
    u = np.exp(np.where(w.real >= 0, -2.0 * w, 2.0 * w))
    return 4.0 * u / (1.0 + u) ** 2


def _tanh_strip(params: Dict[str, float], domain: Domain) -> NamedMap:
    def forward(z):
        x, y = z.real, z.imag
        return np.where(y <= 1.0, np.tanh(QUARTER_PI * z), y * np.tanh(QUARTER_PI * (x + 1j)))

    def mu(z):
        x, y = z.real, z.imag
        w = QUARTER_PI * (x + 1j)
        f_x = y * QUARTER_PI * _sech_squared(w)
        f_y = np.tanh(w)
        above = (f_x + 1j * f_y) / (f_x - 1j * f_y)
        # the seam y = 1 takes the value from above
        return np.where(y < 1.0, 0.0 + 0j, above)

    def boundary(t):
        return np.tanh(QUARTER_PI * np.asarray(t, dtype=float))

    return NamedMap(name="tanh_strip", domain=Domain.UPPER_HALF_PLANE, forward=forward,
                    boundary=boundary, mu_closed_form=mu, params=dict(params))


# shear: f(x + iy) = x + phi(y) + iy, phi(y) = y sin(1/y) on 0 < |y| < 1/pi

def _phi(y):
    inside = (np.abs(y) > 0) & (np.abs(y) < 1.0 / math.pi)
    safe = np.where(inside, y, 1.0)
    return np.where(inside, safe * np.sin(1.0 / safe), 0.0)


def _phi_prime(y):
    inside = (np.abs(y) > 0) & (np.abs(y) < 1.0 / math.pi)
    safe = np.where(inside, y, 1.0)
    return np.where(inside, np.sin(1.0 / safe) - np.cos(1.0 / safe) / safe, 0.0)


def _shear(params: Dict[str, float], domain: Domain) -> NamedMap:
    def forward(z):
        return z.real + _phi(z.imag) + 1j * z.imag

    def mu(z):
        slope = _phi_prime(z.imag)
        return 1j * slope / (2.0 - 1j * slope)

    def boundary(t):
        return np.asarray(t, dtype=float) + 0.0

    return NamedMap(name="shear", domain=Domain.UPPER_HALF_PLANE, forward=forward,
                    boundary=boundary, mu_closed_form=mu, params=dict(params))


_BUILDERS = {
    "radial_twist": (_radial_twist, Domain.UNIT_DISK, ()),
    "prime_end_twist": (_prime_end_twist, Domain.UNIT_DISK, ()),
    "tanh_strip": (_tanh_strip, Domain.UPPER_HALF_PLANE, ()),
    "shear": (_shear, Domain.UPPER_HALF_PLANE, ()),
    "radial_stretch": (_radial_stretch, None, ("K",)),
}


class GalleryService:
    """
    Service class for the example homeomorphisms.
    Provides construction by name, listing, and the Wirtinger oracle.
    """

    @staticmethod
    def names() -> list:
        """Names of all gallery maps, sorted."""
        return sorted(_BUILDERS)

    @staticmethod
    def listing() -> Dict[str, dict]:
        """
        Gallery listing with parameter schemas.

        Returns:
            dict: name -> {"domain": ..., "params": [...]}
        """
        listing = {}
        for name in GalleryService.names():
            _, domain, required = _BUILDERS[name]
            listing[name] = {
                "domain": domain.value if domain is not None else "upper_half_plane|unit_disk",
                "params": list(required),
            }
        return listing

    @staticmethod
    def gallery_map(name: str, params: Optional[Dict[str, float]] = None,
                    domain: Optional[Domain] = None) -> NamedMap:
        """
        Build a gallery map by name.

        Args:
            name: One of GalleryService.names()
            params: Parameters of the map (radial_stretch needs K)
            domain: Domain for radial_stretch; other maps have a fixed domain

        Returns:
            NamedMap: The map with its closed-form Beltrami coefficient

        Raises:
            UnknownName: If no map has this name
            BadParams: If parameters are missing or the domain conflicts
        """
        if name not in _BUILDERS:
            raise UnknownName(f"unknown gallery map '{name}'; known: {GalleryService.names()}")
        builder, fixed_domain, required = _BUILDERS[name]
        params = {key: float(val) for key, val in (params or {}).items()}
        missing = [key for key in required if key not in params]
        if missing:
            raise BadParams(f"{name}: missing parameters {missing}")
        if fixed_domain is not None and domain is not None and domain is not fixed_domain:
            raise BadParams(f"{name} is defined on {fixed_domain.value} only")
        resolved = fixed_domain or domain or Domain.UPPER_HALF_PLANE
        return builder(params, resolved)

    @staticmethod
    def wirtinger_check(named: NamedMap, z: complex, h: float = 1e-5) -> WirtingerResult:
        """
        Central-difference Wirtinger derivatives and the induced mu.

        Args:
            named: Gallery map
            z: Interior point away from seams
            h: Stencil half-width

        Returns:
            WirtingerResult: f_z, f_zbar, their quotient and the closed form at z

        Raises:
            StencilOutOfDomain: If a stencil point leaves the domain
        """
        z = complex(z)
        stencil = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
        if not np.all(in_domain(named.domain, stencil)):
            raise StencilOutOfDomain(f"stencil of width {h} at {z} leaves {named.domain.value}")
        values = named(stencil)
        dx = values[0] - values[1]
        dy = values[2] - values[3]
        fz = complex((dx - 1j * dy) / (4 * h))
        fzbar = complex((dx + 1j * dy) / (4 * h))
        closed = None
        if named.mu_closed_form is not None:
            closed = complex(np.asarray(named.mu_closed_form(np.array([z])))[0])
        return WirtingerResult(z=z, h=h, fz=fz, fzbar=fzbar, mu_fd=fzbar / fz, mu_closed=closed)

    @staticmethod
    def shear_polyline_length(samples: int) -> float:
        """
        Length of the polyline through the shear image of [0, i/pi] at evenly spaced samples.

        The image curve has infinite length; the polyline length keeps growing
        as the sampling is refined.
        """
        if samples < 2:
            raise BadParams("shear_polyline_length needs at least two samples")
        y = np.linspace(0.0, 1.0 / math.pi, samples)
        image = _phi(y) + 1j * y
        return float(np.sum(np.abs(np.diff(image))))
