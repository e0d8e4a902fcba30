"""
Bounds service for the Semiannulus Regularity Toolkit.
Handles the closed-form diameter and offset bounds, sampled complement
diameters and the randomised verification campaigns.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from app.models.bounds import BoundConstants, FuzzRow, RoundSubannulusRow
from app.models.field import Domain
from app.models.semiannulus import SemiannulusSpec
from app.services.geometry import cayley, disk_automorphism, winding_number
from app.services.modulus_service import ModulusService
from app.utils.concurrency import map_settled
from app.utils.errors import DegenerateCell, HypothesisViolated, ToolkitError, UnsupportedSpec, ValidationError
from config.config import get_settings

logger = logging.getLogger(__name__)

CONSTANTS = BoundConstants()

MapFn = Callable[[np.ndarray], np.ndarray]


def _diameter(points: np.ndarray) -> float:
    """Euclidean diameter of a finite point set, over its convex hull when it has one."""
    xy = np.column_stack([points.real, points.imag])
    try:
        xy = xy[ConvexHull(xy).vertices]
    except QhullError:
        pass
    return float(np.max(pdist(xy))) if len(xy) > 1 else 0.0


def _component_boundary(side: np.ndarray, inside: complex, samples: int) -> np.ndarray:
    """
    Close an image side into the boundary of the complementary component containing inside.

    The side runs between two points of the unit circle; of the two circle
    arcs joining its endpoints, the one whose closed curve winds around the
    interior point is kept.
    """
    start, end = np.angle(side[0]), np.angle(side[-1])
    ccw = (start - end) % (2.0 * math.pi)
    steps = np.linspace(0.0, 1.0, samples)
    for sweep in (ccw, ccw - 2.0 * math.pi):
        arc = np.exp(1j * (end + sweep * steps))
        boundary = np.concatenate([side, arc])
        if abs(winding_number(boundary, inside)) >= 0.5:
            return boundary
    raise DegenerateCell("image side does not bound a complementary component")


def _settled(run: Callable, configs: Sequence) -> list:
    """Rows of every configuration; a failure is re-raised carrying the finished rows."""
    rows, failure = map_settled(run, configs, catch=(ToolkitError,))
    if failure is not None:
        failure.partial = [row for row in rows if row is not None]
        logger.warning("campaign failed; %d of %d configurations finished: %s",
                       len(failure.partial), len(configs), failure.detail)
        raise failure
    return rows


class BoundsService:
    """
    Service class for the diameter bounds.
    Provides the closed forms, the sampled left-hand sides and the fuzz campaigns.
    """

    @staticmethod
    def disk_diameter_bound(mod_S: float) -> float:
        """
        Upper bound C exp(-mod S / 2), C = 4 e^{pi/2}, for min{diam U1, diam U2}.

        Raises:
            ValidationError: If mod_S is negative
        """
        if not mod_S >= 0:
            raise ValidationError(f"modulus must be non-negative, got {mod_S}")
        return CONSTANTS.C_disk * math.exp(-0.5 * mod_S)

    @staticmethod
    def hyperbolic_sharp_bound(mod_T: float, zeta: complex = 1.0) -> Tuple[float, SemiannulusSpec]:
        """
        Sharp bound 2 / cosh(mod T / 2) for semiannuli with hyperbolic sides.

        Returns:
            tuple: (bound, witness T(zeta; r, 1/r) with r = e^{-mod_T / 2})
        """
        if not mod_T > 0:
            raise ValidationError(f"modulus must be positive, got {mod_T}")
        r = math.exp(-0.5 * mod_T)
        return 2.0 / math.cosh(0.5 * mod_T), SemiannulusSpec.disk(zeta, r, 1.0 / r)

    @staticmethod
    def halfplane_offset_bound(mod_S: float, dist_t0_U2: float) -> float:
        """
        Bound e^{pi} dist(t0, U2) e^{-mod S} on sup |z - t0| over U1.

        Raises:
            HypothesisViolated: If mod_S <= pi
            ValidationError: If the distance is not positive
        """
        if not dist_t0_U2 > 0:
            raise ValidationError(f"distance must be positive, got {dist_t0_U2}")
        if not mod_S > CONSTANTS.separation_loss:
            raise HypothesisViolated(f"offset bound needs mod S > pi, got {mod_S}")
        return CONSTANTS.C_halfplane * dist_t0_U2 * math.exp(-mod_S)

    @staticmethod
    def complement_min_diameter(map_fn: MapFn, spec: SemiannulusSpec,
                                resolution: Optional[int] = None) -> float:
        """
        Smaller Euclidean diameter of the two components of D minus f(T).

        Each component is bounded by the image of one side and an arc of the
        unit circle; both are sampled and the diameter taken over the samples,
        so the result approaches the true value from below.

        Args:
            map_fn: Self-homeomorphism of the disk, continuous up to the circle
            spec: Disk semiannulus T(zeta; r1, r2)
            resolution: Samples per side and per arc (defaults to DIAMETER_SAMPLES)

        Raises:
            UnsupportedSpec: For half-plane specs
            DegenerateCell: If the map is not finite on a side
        """
        if spec.domain is not Domain.UNIT_DISK:
            raise UnsupportedSpec("complement_min_diameter needs a disk semiannulus")
        samples = resolution or get_settings().DIAMETER_SAMPLES
        theta = np.linspace(*spec.theta_range, samples)
        diameters = []
        for radius, probe in ((spec.inner, 0.5 * spec.inner), (spec.outer, 2.0 * spec.outer)):
            side = np.asarray(map_fn(cayley(radius * np.exp(1j * theta), spec.zeta)), dtype=complex)
            if not np.all(np.isfinite(side)):
                raise DegenerateCell(f"map is not finite on the side of radius {radius:.6g}")
            inside = complex(np.asarray(map_fn(cayley(np.array([1j * probe]), spec.zeta)))[0])
            diameters.append(_diameter(_component_boundary(side, inside, samples)))
        return min(diameters)

    @staticmethod
    def fuzz_disk_bound(count: int = 100, seed: Optional[int] = None, resolution: int = 32,
                        samples: Optional[int] = None) -> List[FuzzRow]:
        """
        Check min diam <= C exp(-mod / 2) on random disk semiannuli moved by random automorphisms.

        The modulus is the discrete modulus of the image mesh, so the campaign
        exercises the engine and the bound together.
        """
        rng = np.random.default_rng(get_settings().SEED if seed is None else seed)
        configs = []
        for _ in range(count):
            zeta_arg = rng.uniform(-math.pi, math.pi)
            r1 = math.exp(rng.uniform(-3.0, 0.0))
            r2 = r1 * math.exp(rng.uniform(0.5, 6.0))
            a = rng.uniform(0.0, 0.9) * complex(np.exp(1j * rng.uniform(-math.pi, math.pi)))
            phi = rng.uniform(-math.pi, math.pi)
            configs.append((zeta_arg, r1, r2, a, phi))

        def run(config) -> FuzzRow:
            zeta_arg, r1, r2, a, phi = config
            spec = SemiannulusSpec.disk(complex(np.exp(1j * zeta_arg)), r1, r2)

            def move(z):
                return disk_automorphism(z, a, phi)

            mesh = ModulusService.mesh_region(move, spec, resolution, resolution, label="automorphism")
            mod = ModulusService.discrete_modulus(mesh).value
            lhs = BoundsService.complement_min_diameter(move, spec, samples)
            rhs = BoundsService.disk_diameter_bound(mod)
            return FuzzRow(zeta_arg=zeta_arg, r1=r1, r2=r2, a_re=a.real, a_im=a.imag, phi=phi,
                           mod=mod, lhs=lhs, rhs=rhs, margin=rhs - lhs)

        rows = _settled(run, configs)
        worst = min(rows, key=lambda row: row.margin) if rows else None
        if worst is not None:
            logger.info("fuzz campaign: %d configurations, worst margin %.6g", len(rows), worst.margin)
        return rows

    @staticmethod
    def write_fuzz_csv(rows: Sequence, path) -> None:
        """Write campaign rows as CSV, one row per configuration."""
        if not rows:
            raise ValidationError("no rows to write")
        fieldnames = list(type(rows[0]).model_fields)
        with Path(path).open("w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=fieldnames)
            writer.writeheader()
            for row in rows:
                writer.writerow({key: repr(value) for key, value in row.model_dump().items()})

    @staticmethod
    def round_subannulus_campaign(count: int = 20, seed: Optional[int] = None,
                                  n: int = 16, m: int = 256) -> List[RoundSubannulusRow]:
        """
        Largest round annuli about z0 inside Möbius images of round annuli.

        The ring is the image of A(0; 1, e^mod) under z -> 1/(z - p) with the
        pole p outside the closed annulus, and z0 = -1/p is the image of 0.
        slack = log(R/r) - (mod - pi) must be non-negative.
        """
        rng = np.random.default_rng(get_settings().SEED if seed is None else seed)
        configs = []
        for _ in range(count):
            mod_exact = rng.uniform(math.pi + 0.25, 6.0)
            outer = math.exp(mod_exact)
            pole = outer * rng.uniform(1.5, 4.0) * complex(np.exp(1j * rng.uniform(-math.pi, math.pi)))
            configs.append((mod_exact, outer, pole))

        def run(config) -> RoundSubannulusRow:
            mod_exact, outer, pole = config

            def mobius(z):
                return 1.0 / (z - pole)

            ring = ModulusService.mesh_ring(mobius, 1.0, outer, n, m, label="mobius")
            mod = ModulusService.discrete_modulus(ring).value
            sub_r, sub_R = ModulusService.max_round_subannulus(ring, -1.0 / pole)
            log_ratio = math.log(sub_R / sub_r)
            return RoundSubannulusRow(pole_re=pole.real, pole_im=pole.imag, inner=1.0, outer=outer,
                                      mod=mod, mod_exact=mod_exact, sub_r=sub_r, sub_R=sub_R,
                                      log_ratio=log_ratio,
                                      slack=log_ratio - (mod - CONSTANTS.separation_loss))

        return _settled(run, configs)
