"""
Quadrature service for the Semiannulus Regularity Toolkit.
Handles the singular annulus integrals in log-polar coordinates, the Hölder
mean, the Carleson integral and limit probes over schedules.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from app.models.field import BeltramiField, Domain
from app.models.quadrature import (
    KernelKind,
    LimitVerdict,
    OmegaIdentityResult,
    QuadratureOptions,
    QuadratureResult,
    VerdictStatus,
)
from app.models.semiannulus import SemiannulusSpec
from app.services.geometry import cayley, cayley_derivative
from app.utils.concurrency import map_ordered
from app.utils.errors import DomainMismatch, GridTooCoarse, ToleranceNotReached, ValidationError
from app.utils.validators import validate_schedule, validate_sector
from config.config import get_settings

logger = logging.getLogger(__name__)

# smallest relative height sampled by the eta grid
ETA_Y_FLOOR = 1e-8

LevelFn = Callable[[int, int], Tuple[float, int]]


def _flat_integrand(kernel: KernelKind, mu: np.ndarray, direction: np.ndarray,
                    z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """
    Half-plane kernels multiplied by |z - t|^2, i.e. the integrand in (s, theta).

    direction is conj(w)/w for w = z - t.
    """
    modulus_sq = np.abs(mu) ** 2
    denom = 1.0 - modulus_sq
    rotated = mu * direction
    if kernel is KernelKind.D_PLUS_MINUS_ONE:
        return np.abs(1.0 - rotated) ** 2 / denom - 1.0
    if kernel is KernelKind.D_MINUS_MINUS_ONE:
        return np.abs(1.0 + rotated) ** 2 / denom - 1.0
    if kernel is KernelKind.SQUARED_MODULUS:
        return modulus_sq / denom
    if kernel is KernelKind.REAL_QUADRATIC:
        return rotated.real / denom
    if kernel is KernelKind.BRAKALOVA_JENKINS:
        return (modulus_sq + np.abs(rotated.real)) / denom
    if kernel is KernelKind.INFINITY_KERNEL:
        about_origin = mu * np.conj(z) / z
        return (modulus_sq - about_origin.real) / denom * np.abs(w) ** 2 / np.abs(z) ** 2
    raise DomainMismatch(f"kernel {kernel.value} is not a half-plane kernel")


def _disk_integrand(kernel: KernelKind, mu: np.ndarray, z: np.ndarray,
                    jacobian: np.ndarray, zeta: complex) -> np.ndarray:
    """Disk kernels multiplied by the Jacobian of u = e^{s + i theta} -> z."""
    modulus_sq = np.abs(mu) ** 2
    denom = 1.0 - modulus_sq
    gap = z * z - zeta * zeta
    if kernel is KernelKind.DISK_SQUARED:
        return modulus_sq / (denom * np.abs(gap) ** 2) * jacobian
    if kernel is KernelKind.DISK_REAL:
        return (zeta * zeta * mu / gap ** 2).real / denom * jacobian
    raise DomainMismatch(f"kernel {kernel.value} is not a disk kernel")


def _refine(level_fn: LevelFn, n_a: int, n_b: int, options: QuadratureOptions,
            label: str) -> QuadratureResult:
    """
    Dyadic refinement of a tensor midpoint rule.

    level_fn(n_a, n_b) returns (value, clipped count) on an n_a x n_b grid.
    Both axes double per level until two consecutive levels agree to
    max(abs_tol, rel_tol |I|) or the next level would exceed the cell cap.
    """
    previous = None
    error = math.inf
    levels = 0
    converged = False
    while True:
        value, clipped = level_fn(n_a, n_b)
        cells = n_a * n_b
        levels += 1
        if not math.isfinite(value):
            break
        if previous is not None:
            error = abs(value - previous)
            if levels >= options.min_levels and error <= max(options.abs_tol, options.rel_tol * abs(value)):
                converged = True
                break
        if 4 * cells > options.max_cells:
            break
        previous = value
        n_a *= 2
        n_b *= 2

    warnings = []
    if not math.isfinite(value):
        warnings.append(f"{label}: non-finite integrand value")
        value, error = float("nan"), math.inf
    elif not converged:
        if not math.isfinite(error):
            error = abs(value)
        message = f"{label}: tolerance not reached at {cells} cells (level difference {error:.3g})"
        logger.warning(message)
        warnings.append(message)

    fraction = clipped / cells if cells else 0.0
    if fraction > 0:
        logger.info("%s: clipped fraction %.3g", label, fraction)
        warnings.append(f"{label}: clipped fraction {fraction:.3g}")

    return QuadratureResult(
        value=float(value),
        abs_error_estimate=float(error) if math.isfinite(error) else float(np.finfo(float).max),
        cells=cells,
        clipped_fraction=min(1.0, fraction),
        converged=converged,
        levels=levels,
        warnings=warnings,
    )


def _midpoints(lower: float, upper: float, count: int) -> Tuple[np.ndarray, float]:
    step = (upper - lower) / count
    return lower + (np.arange(count) + 0.5) * step, step


def _theta_cells(theta1: float, theta2: float) -> int:
    return max(4, math.ceil(16 * (theta2 - theta1) / math.pi))


def _fit_slope(trace: Sequence[Tuple[float, float]]) -> Optional[float]:
    """Least-squares slope of value against log(1/parameter)."""
    points = [(p, v) for p, v in trace if p > 0 and math.isfinite(v)]
    if len(points) < 2:
        return None
    x = np.array([-math.log(p) for p, _ in points])
    y = np.array([v for _, v in points])
    if np.ptp(x) == 0:
        return None
    return float(np.polyfit(x, y, 1)[0])


class QuadratureService:
    """
    Service class for singular annulus integrals.
    Provides the kernel integrals, Q and omega quantities, the Carleson
    integral and the limit probe.
    """

    @staticmethod
    def annulus_integral(mu: BeltramiField, spec: SemiannulusSpec, kernel: KernelKind,
                         options: Optional[QuadratureOptions] = None,
                         strict: bool = False) -> QuadratureResult:
        """
        Integrate a kernel over a (sector-restricted) semiannulus.

        Half-plane specs use z = t + e^{s+i theta}, where dxdy/|z - t|^2 = ds dtheta.
        Disk specs use z = M(u), u = e^{s+i theta}, with the Jacobian |M'(u)|^2 |u|^2.

        Args:
            mu: Beltrami field on the spec's domain
            spec: Semiannulus to integrate over
            kernel: Integrand
            options: Engine tolerances (defaults from settings)
            strict: Raise ToleranceNotReached instead of flagging the result

        Returns:
            QuadratureResult: Value, level-difference error estimate and diagnostics

        Raises:
            DomainMismatch: If field, spec and kernel live on different domains
            ToleranceNotReached: With strict=True, if the cell cap is hit first
        """
        options = options or QuadratureOptions.from_settings()
        if mu.domain is not spec.domain or kernel.domain is not spec.domain:
            raise DomainMismatch(
                f"field on {mu.domain.value}, spec on {spec.domain.value}, kernel {kernel.value}"
            )
        log_inner, log_outer = math.log(spec.inner), math.log(spec.outer)
        theta1, theta2 = spec.theta_range
        center = spec.center
        zeta = spec.zeta

        def level(n_s: int, n_theta: int) -> Tuple[float, int]:
            s, ds = _midpoints(log_inner, log_outer, n_s)
            theta, dtheta = _midpoints(theta1, theta2, n_theta)
            unit = np.exp(1j * theta)[None, :]
            direction = np.exp(-2j * theta)[None, :]
            partials = []
            clipped = 0
            for start in range(0, n_s, options.chunk_rows):
                w = np.exp(s[start:start + options.chunk_rows])[:, None] * unit
                if spec.domain is Domain.UNIT_DISK:
                    z = cayley(w, zeta)
                    values, mask = mu.evaluate(z)
                    jacobian = np.abs(cayley_derivative(w, zeta)) ** 2 * np.abs(w) ** 2
                    integrand = _disk_integrand(kernel, values, z, jacobian, zeta)
                else:
                    z = center + w
                    values, mask = mu.evaluate(z)
                    integrand = _flat_integrand(kernel, values, direction, z, w)
                partials.append(np.sum(integrand))
                clipped += int(np.count_nonzero(mask))
            return float(np.sum(partials)) * ds * dtheta, clipped

        n_s = max(4, math.ceil(4 * (log_outer - log_inner)))
        result = _refine(level, n_s, _theta_cells(theta1, theta2), options, kernel.value)
        if strict and not result.converged:
            raise ToleranceNotReached(result.warnings[0] if result.warnings else "tolerance not reached",
                                      context={"value": result.value, "cells": result.cells})
        return result

    @staticmethod
    def q_modulus_ratio(mu: BeltramiField, t: float, r: float, R: float,
                        options: Optional[QuadratureOptions] = None,
                        sector=None) -> QuadratureResult:
        """
        Q_mu(t;r,R) = 1 + (1/(pi log(R/r))) * integral of (D_{mu,t} - 1)/|z - t|^2.

        Returns:
            QuadratureResult: Q with the scaled error estimate
        """
        spec = SemiannulusSpec.half_plane(t, r, R, sector=sector)
        integral = QuadratureService.annulus_integral(mu, spec, KernelKind.D_PLUS_MINUS_ONE, options)
        return integral.scaled(1.0 / (math.pi * spec.log_ratio), 1.0)

    @staticmethod
    def holder_mean(mu: BeltramiField, t: float, r: float, sector=None, inner: float = 0.0,
                    options: Optional[QuadratureOptions] = None) -> QuadratureResult:
        """
        omega(t;r) = (2/(pi r^2)) * area integral of (D_{mu,t} - 1) over A(t;inner,r) ∩ H.

        Computed in polar coordinates around t, where the singularity at the
        centre is integrable. inner > 0 cuts out a small half-disk.

        Args:
            mu: Half-plane field
            t: Boundary point
            r: Outer radius
            sector: Optional angular restriction
            inner: Inner cut-off radius, 0 <= inner < r
            options: Engine tolerances

        Returns:
            QuadratureResult: omega, which is >= -1 up to quadrature error

        Raises:
            ValidationError: If the radii are out of order
            DomainMismatch: If mu is not a half-plane field
        """
        options = options or QuadratureOptions.from_settings()
        if mu.domain is not Domain.UPPER_HALF_PLANE:
            raise DomainMismatch("holder_mean needs a half-plane field")
        if not (r > 0 and 0 <= inner < r):
            raise ValidationError(f"holder_mean needs 0 <= inner < r, got inner={inner}, r={r}")
        validate_sector(sector)
        theta1, theta2 = sector if sector is not None else (0.0, math.pi)
        scale = 2.0 / (math.pi * r * r)

        def level(n_rho: int, n_theta: int) -> Tuple[float, int]:
            rho, drho = _midpoints(inner, r, n_rho)
            theta, dtheta = _midpoints(theta1, theta2, n_theta)
            unit = np.exp(1j * theta)[None, :]
            direction = np.exp(-2j * theta)[None, :]
            partials = []
            clipped = 0
            for start in range(0, n_rho, options.chunk_rows):
                radii = rho[start:start + options.chunk_rows][:, None]
                values, mask = mu.evaluate(t + radii * unit)
                excess = _flat_integrand(KernelKind.D_PLUS_MINUS_ONE, values, direction, None, None)
                partials.append(np.sum(excess * radii))
                clipped += int(np.count_nonzero(mask))
            return float(np.sum(partials)) * drho * dtheta * scale, clipped

        return _refine(level, 16, _theta_cells(theta1, theta2), options, "holder_mean")

    @staticmethod
    def omega_log_integral(mu: BeltramiField, t: float, r: float, R: float, sector=None,
                           inner: float = 0.0, nodes: Optional[int] = None,
                           options: Optional[QuadratureOptions] = None) -> QuadratureResult:
        """
        Integral of omega(t;s) ds/s over [r, R], by Gauss-Legendre in log s.

        The error estimate adds the nodes vs nodes/2 rule difference to the
        weighted errors of the omega evaluations.
        """
        nodes = nodes or get_settings().OMEGA_NODES
        if not 0 < r < R:
            raise ValidationError(f"omega_log_integral needs 0 < r < R, got ({r}, {R})")
        a, b = math.log(r), math.log(R)

        def rule(count: int):
            x, weights = leggauss(count)
            tau = 0.5 * (b - a) * x + 0.5 * (b + a)
            return np.exp(tau), 0.5 * (b - a) * weights

        fine_s, fine_w = rule(nodes)
        coarse_s, coarse_w = rule(max(2, nodes // 2))
        radii = list(fine_s) + list(coarse_s)
        means = map_ordered(
            lambda s: QuadratureService.holder_mean(mu, t, float(s), sector, inner, options), radii
        )
        fine, coarse = means[:nodes], means[nodes:]
        value = float(np.dot(fine_w, [m.value for m in fine]))
        coarse_value = float(np.dot(coarse_w, [m.value for m in coarse]))
        weighted = float(np.dot(fine_w, [m.abs_error_estimate for m in fine]))
        warnings = [w for m in fine for w in m.warnings]
        return QuadratureResult(
            value=value,
            abs_error_estimate=abs(value - coarse_value) + weighted,
            cells=sum(m.cells for m in means),
            clipped_fraction=max(m.clipped_fraction for m in means),
            converged=all(m.converged for m in means),
            levels=max(m.levels for m in means),
            warnings=warnings,
        )

    @staticmethod
    def omega_identity(mu: BeltramiField, t: float, r: float, R: float, sector=None,
                       inner: float = 0.0, options: Optional[QuadratureOptions] = None,
                       nodes: Optional[int] = None) -> OmegaIdentityResult:
        """
        Evaluate both sides of (Q - 1) log(R/r) = [omega(R) - omega(r)]/2 + int_r^R omega ds/s.

        The identity holds for any inner cut-off and any sector, both applied
        to omega and Q alike.
        """
        if inner >= r:
            raise ValidationError(f"inner cut-off {inner} must be below r = {r}")
        spec = SemiannulusSpec.half_plane(t, r, R, sector=sector)
        integral = QuadratureService.annulus_integral(mu, spec, KernelKind.D_PLUS_MINUS_ONE, options)
        omega_r = QuadratureService.holder_mean(mu, t, r, sector, inner, options)
        omega_R = QuadratureService.holder_mean(mu, t, R, sector, inner, options)
        log_integral = QuadratureService.omega_log_integral(mu, t, r, R, sector, inner, nodes, options)

        lhs = integral.value / math.pi
        rhs = 0.5 * (omega_R.value - omega_r.value) + log_integral.value
        bound = (integral.abs_error_estimate / math.pi
                 + 0.5 * (omega_R.abs_error_estimate + omega_r.abs_error_estimate)
                 + log_integral.abs_error_estimate)
        return OmegaIdentityResult(
            lhs=lhs,
            rhs=rhs,
            omega_inner=omega_r.value,
            omega_outer=omega_R.value,
            omega_log_integral=log_integral.value,
            error_bound=bound,
            converged=all(q.converged for q in (integral, omega_r, omega_R, log_integral)),
        )

    @staticmethod
    def carleson_eta(mu: BeltramiField, s: float, samples: Optional[int] = None,
                     x_window: Optional[float] = None, refine: bool = True) -> float:
        """
        Sampled eta(s) = sup of |mu| over the strip 0 < Im z <= s, |Re z| <= X.

        The supremum is taken over a geometric grid in y and a uniform grid in x,
        so it is a lower bound of the essential supremum.

        Args:
            mu: Half-plane field
            s: Strip height
            samples: Points of the y-grid (x uses CARLESON_X_SAMPLES)
            x_window: Half-width X of the sampled window
            refine: Compare against the nested doubled grid

        Returns:
            float: eta(s), from the doubled grid when refine is set

        Raises:
            GridTooCoarse: If doubling the grid raises eta by more than ETA_REFINE_TOL
        """
        settings = get_settings()
        if mu.domain is not Domain.UPPER_HALF_PLANE:
            raise DomainMismatch("carleson_eta needs a half-plane field")
        if not s > 0:
            raise ValidationError(f"strip height must be positive, got {s}")
        n_y = samples or settings.CARLESON_SAMPLES
        n_x = settings.CARLESON_X_SAMPLES
        window = x_window if x_window is not None else settings.CARLESON_X_WINDOW

        def sup_on(count_y: int, count_x: int) -> float:
            y = s * np.geomspace(ETA_Y_FLOOR, 1.0, count_y)
            x = np.linspace(-window, window, count_x)
            return float(np.max(np.abs(mu(x[None, :] + 1j * y[:, None]))))

        coarse = sup_on(n_y, n_x)
        if not refine:
            return coarse
        fine = sup_on(2 * n_y - 1, 2 * n_x - 1)
        if fine - coarse > settings.ETA_REFINE_TOL:
            raise GridTooCoarse(f"eta({s}) rose from {coarse:.6g} to {fine:.6g} under refinement",
                                context={"s": s, "coarse": coarse, "fine": fine})
        return fine

    @staticmethod
    def carleson_pieces(mu: BeltramiField, edges: Sequence[float], nodes: int = 8,
                        samples: Optional[int] = None) -> List[QuadratureResult]:
        """
        Integral of eta(s)/s over consecutive intervals [edges[k+1], edges[k]] of a decreasing sequence.

        Each piece is integrated by Gauss-Legendre in log s; the error is the
        nodes vs nodes/2 difference.
        """
        QuadratureService.carleson_eta(mu, float(edges[0]), samples, refine=True)
        x_fine, w_fine = leggauss(nodes)
        x_coarse, w_coarse = leggauss(max(2, nodes // 2))

        def piece(bounds: Tuple[float, float]) -> QuadratureResult:
            lower, upper = math.log(bounds[1]), math.log(bounds[0])
            half, mid = 0.5 * (upper - lower), 0.5 * (upper + lower)

            def rule(x, w):
                etas = [QuadratureService.carleson_eta(mu, math.exp(half * xi + mid), samples, refine=False)
                        for xi in x]
                return half * float(np.dot(w, etas))

            fine = rule(x_fine, w_fine)
            coarse = rule(x_coarse, w_coarse)
            return QuadratureResult(value=fine, abs_error_estimate=abs(fine - coarse),
                                    cells=len(x_fine) + len(x_coarse))

        return map_ordered(piece, list(zip(edges[:-1], edges[1:])))

    @staticmethod
    def carleson_integral(mu: BeltramiField, s0: float, s1: float,
                          samples: Optional[int] = None) -> QuadratureResult:
        """
        Integral of eta(s)/s over [s0, s1] by log-substitution, split at dyadic points.

        Raises:
            ValidationError: Unless 0 < s0 < s1
            GridTooCoarse: As carleson_eta
        """
        if not 0 < s0 < s1:
            raise ValidationError(f"carleson_integral needs 0 < s0 < s1, got ({s0}, {s1})")
        count = max(1, math.ceil(math.log2(s1 / s0)))
        edges = [max(s0, s1 * 2.0 ** (-k)) for k in range(count + 1)]
        edges[-1] = s0
        pieces = QuadratureService.carleson_pieces(mu, edges, samples=samples)
        return QuadratureResult(
            value=float(sum(p.value for p in pieces)),
            abs_error_estimate=float(sum(p.abs_error_estimate for p in pieces)),
            cells=sum(p.cells for p in pieces),
        )

    @staticmethod
    def judge_trace(trace: Sequence[Tuple[float, float]], reliable: Optional[Sequence[bool]] = None,
                    cauchy_tol: Optional[float] = None,
                    diverge_threshold: Optional[float] = None) -> LimitVerdict:
        """
        Verdict for an evaluated trace.

        ConvergesTo(v): the last three values agree pairwise to cauchy_tol and
        were reliably computed; v is the last value. Diverges: the last three
        values all exceed the threshold in absolute value and grow monotonically.
        Inconclusive otherwise.
        """
        settings = get_settings()
        tol = cauchy_tol if cauchy_tol is not None else settings.CAUCHY_TOL
        threshold = diverge_threshold if diverge_threshold is not None else settings.DIVERGE_THRESHOLD
        trace = [(float(p), float(v)) for p, v in trace]
        flags = list(reliable) if reliable is not None else [True] * len(trace)
        values = [v for _, v in trace]
        tail = values[-3:]
        tail_reliable = all(flags[-3:])
        slope = _fit_slope(trace)

        if len(tail) == 3 and all(math.isfinite(v) for v in tail):
            if tail_reliable and max(tail) - min(tail) <= tol:
                return LimitVerdict(status=VerdictStatus.CONVERGES_TO, value=tail[-1], trace=trace,
                                    slope=slope, reliable=True)
            magnitudes = [abs(v) for v in tail]
            if all(m > threshold for m in magnitudes) and magnitudes[0] < magnitudes[1] < magnitudes[2]:
                return LimitVerdict(status=VerdictStatus.DIVERGES, trace=trace, slope=slope,
                                    reliable=tail_reliable)
        return LimitVerdict(status=VerdictStatus.INCONCLUSIVE, trace=trace, slope=slope,
                            reliable=tail_reliable)

    @staticmethod
    def limit_probe(evaluator: Callable[[float], float], schedule: Sequence[float],
                    cauchy_tol: Optional[float] = None,
                    diverge_threshold: Optional[float] = None) -> LimitVerdict:
        """
        Evaluate along a schedule and judge the limit.

        Args:
            evaluator: Function of the schedule parameter
            schedule: Strictly monotone parameters, at least 4
            cauchy_tol: Cauchy tolerance (defaults to CAUCHY_TOL)
            diverge_threshold: Divergence threshold (defaults to DIVERGE_THRESHOLD)

        Returns:
            LimitVerdict: ConvergesTo, Diverges or Inconclusive with the full trace
        """
        validate_schedule(schedule)
        trace = [(p, float(evaluator(p))) for p in schedule]
        return QuadratureService.judge_trace(trace, None, cauchy_tol, diverge_threshold)

    @staticmethod
    def trace_slope(trace: Sequence[Tuple[float, float]]) -> Optional[float]:
        """Least-squares slope of a trace's values against log(1/parameter)."""
        return _fit_slope(trace)

    @staticmethod
    def default_schedule(R: float, levels: Optional[int] = None) -> List[float]:
        """r_k = R 2^{-k}, k = 1..levels."""
        levels = levels or get_settings().SCHEDULE_LEVELS
        return [R * 2.0 ** (-k) for k in range(1, levels + 1)]
