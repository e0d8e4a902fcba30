"""
Certify service for the Semiannulus Regularity Toolkit.
Evaluates the boundary-regularity hypotheses of a Beltrami coefficient over
shrinking semiannuli and cross-checks them against the maps themselves.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.models.certificate import (
    BoundaryExponent,
    ConditionName,
    ConditionVerdict,
    Conclusion,
    DerivedConstants,
    RegularityCertificate,
    TraceRecord,
)
from app.models.field import BeltramiField, Domain
from app.models.gallery import NamedMap
from app.models.quadrature import KernelKind, LimitVerdict, QuadratureOptions, QuadratureResult, VerdictStatus
from app.models.semiannulus import SemiannulusSpec
from app.services.modulus_service import ModulusService
from app.services.quadrature_service import QuadratureService
from app.utils.concurrency import map_ordered
from app.utils.errors import (
    DegenerateCell,
    DomainMismatch,
    GridTooCoarse,
    SolveFailure,
    UnsupportedSpec,
    ValidationError,
)
from app.utils.validators import is_unit, validate_interval, validate_schedule
from config.config import get_settings

logger = logging.getLogger(__name__)

_HALF_PLANE_CONDITIONS = (
    (ConditionName.COND1, KernelKind.SQUARED_MODULUS),
    (ConditionName.COND2, KernelKind.REAL_QUADRATIC),
)
_DISK_CONDITIONS = (
    (ConditionName.DISK_COND_I, KernelKind.DISK_SQUARED),
    (ConditionName.DISK_COND_II, KernelKind.DISK_REAL),
)

# disk kernel integrals over T(zeta; r1, r2) are a quarter of the pulled-back half-plane ones
DISK_NORMALISATION = 4.0

# |alpha_hat - 1| below which the boundary map is treated as differentiable
DERIVATIVE_ALPHA_TOL = 0.05

# fraction of INFINITY_TOL granted to the accumulated quadrature error of the infinity trace
INFINITY_ERROR_SHARE = 0.1

SpecFactory = Callable[[float, float], SemiannulusSpec]


def _unique(messages: Sequence[str]) -> List[str]:
    return list(dict.fromkeys(messages))


def _decreasing_edges(R0: float, schedule: Optional[Sequence[float]]) -> List[float]:
    """[R0, r_1, r_2, ...] for a schedule decreasing to 0 below R0."""
    if not (math.isfinite(R0) and R0 > 0):
        raise ValidationError(f"R0 must be positive, got {R0}")
    schedule = list(schedule) if schedule is not None else QuadratureService.default_schedule(R0)
    validate_schedule(schedule)
    if not (schedule[0] > schedule[-1] > 0 and schedule[0] < R0):
        raise ValidationError("schedule must decrease from below R0 towards 0")
    return [float(R0)] + [float(r) for r in schedule]


def _t_grid(interval: Sequence[float], points: Optional[int]) -> List[float]:
    validate_interval(interval)
    a, b = float(interval[0]), float(interval[1])
    if a == b:
        return [a]
    count = points or get_settings().T_GRID_POINTS
    return [float(t) for t in np.linspace(a, b, max(2, count))]


def _pieces(mu: BeltramiField, make_spec: SpecFactory, kernels: Sequence[KernelKind],
            edges: Sequence[float], options: Optional[QuadratureOptions],
            scale: float = 1.0) -> List[List[QuadratureResult]]:
    """Integrals of each kernel over the consecutive pieces between edges."""
    jobs = [(kernel, lo, hi) for kernel in kernels
            for hi, lo in zip(edges[:-1], edges[1:])]

    def run(job):
        kernel, lo, hi = job
        result = QuadratureService.annulus_integral(mu, make_spec(min(lo, hi), max(lo, hi)), kernel, options)
        return result.scaled(scale) if scale != 1.0 else result

    results = map_ordered(run, jobs)
    count = len(edges) - 1
    return [results[k * count:(k + 1) * count] for k in range(len(kernels))]


def _tail_verdict(pieces: Sequence[QuadratureResult], edges: Sequence[float],
                  tol: float) -> Tuple[LimitVerdict, List[Tuple[float, float]]]:
    """
    Verdict on the tail integrals over the pieces A(t; r_k, r_{k-1}).

    The trace is the density piece / log(r_{k-1} / r_k); the cumulative sum
    decides divergence and has to be Cauchy before a vanishing density counts.
    """
    densities, cumulative = [], []
    total = 0.0
    for piece, outer, inner in zip(pieces, edges[:-1], edges[1:]):
        total += piece.value
        densities.append((inner, piece.value / math.log(outer / inner)))
        cumulative.append((inner, total))
    reliable = [piece.converged for piece in pieces]
    density = QuadratureService.judge_trace(densities, reliable, tol)
    summed = QuadratureService.judge_trace(cumulative, reliable, tol)
    if summed.diverges:
        verdict = density.model_copy(update={"status": VerdictStatus.DIVERGES, "value": None})
    elif density.converges and abs(density.value) <= tol and not summed.converges:
        verdict = density.model_copy(update={"status": VerdictStatus.INCONCLUSIVE, "value": None})
    else:
        verdict = density
    warnings = _unique([w for piece in pieces for w in piece.warnings])
    return verdict.model_copy(update={"warnings": warnings}), cumulative


def _vanishes(verdict: Optional[LimitVerdict], tol: float) -> bool:
    return verdict is not None and verdict.converges_to(0.0, tol)


def _condition_certificate(mu: BeltramiField, make_spec: SpecFactory, conditions, edges,
                           options, scale: float) -> RegularityCertificate:
    tol = get_settings().CAUCHY_TOL
    kernels = [kernel for _, kernel in conditions]
    all_pieces = _pieces(mu, make_spec, kernels, edges, options, scale)
    certificate = RegularityCertificate(grids={"schedule": list(edges[1:]), "R0": edges[0]})
    for (name, kernel), pieces in zip(conditions, all_pieces):
        verdict, cumulative = _tail_verdict(pieces, edges, tol)
        certificate.verdicts.append(ConditionVerdict(name=name, verdict=verdict))
        certificate.traces.append(TraceRecord(name=f"{name.value}:density", points=verdict.trace))
        certificate.traces.append(TraceRecord(name=f"{name.value}:cumulative", points=cumulative))
        certificate.warnings.extend(verdict.warnings)
    first, second = (certificate.verdicts[0].verdict, certificate.verdicts[1].verdict)
    if _vanishes(first, tol) and _vanishes(second, tol):
        certificate.conclusion = Conclusion.DIFFERENTIABLE
    certificate.warnings = _unique(certificate.warnings)
    return certificate


class CertifyService:
    """
    Service class for regularity certificates.
    Provides point, interval, infinity and disk certificates, the modulus
    divergence check, the empirical boundary exponent and the Carleson test.
    """

    @staticmethod
    def certify_point(mu: BeltramiField, t: float, R0: float = 1.0,
                      schedule: Optional[Sequence[float]] = None,
                      options: Optional[QuadratureOptions] = None,
                      brakalova_jenkins: bool = True, sectors: Sequence[Tuple[float, float]] = ()
                      ) -> RegularityCertificate:
        """
        Evaluate both differentiability conditions at a boundary point.

        Args:
            mu: Half-plane Beltrami field
            t: Boundary point
            R0: Outer radius of the first piece
            schedule: Radii decreasing to 0 (defaults to R0 2^{-k}, k = 1..SCHEDULE_LEVELS)
            options: Quadrature options
            brakalova_jenkins: Also report the BrakalovaJenkins integral
            sectors: Angular sectors for which the G and H tails are traced

        Returns:
            RegularityCertificate: Differentiable only if Cond1 and Cond2 both converge to 0
        """
        if mu.domain is not Domain.UPPER_HALF_PLANE:
            raise DomainMismatch("certify_point needs a half-plane field")
        if not math.isfinite(t):
            raise ValidationError(f"t must be finite, got {t}")
        edges = _decreasing_edges(R0, schedule)
        conditions = list(_HALF_PLANE_CONDITIONS)
        if brakalova_jenkins:
            conditions.append((ConditionName.BRAKALOVA_JENKINS, KernelKind.BRAKALOVA_JENKINS))
        certificate = _condition_certificate(
            mu, lambda lo, hi: SemiannulusSpec.half_plane(t, lo, hi), conditions, edges, options, 1.0
        )
        # G and H: tails of D_{mu,t} - 1 and D_{-mu,t} - 1 over sectors
        for sector in sectors:
            label = f"[{sector[0]:.6g},{sector[1]:.6g}]"
            pieces = _pieces(mu, lambda lo, hi, s=tuple(sector): SemiannulusSpec.half_plane(t, lo, hi, sector=s),
                             [KernelKind.D_PLUS_MINUS_ONE, KernelKind.D_MINUS_MINUS_ONE], edges, options)
            for prefix, kernel_pieces in zip(("G", "H"), pieces):
                _, cumulative = _tail_verdict(kernel_pieces, edges, get_settings().CAUCHY_TOL)
                certificate.traces.append(TraceRecord(name=f"{prefix}{label}", points=cumulative))
        certificate.input = {"field": mu.label, "params": dict(mu.params), "domain": mu.domain.value, "t": t}
        logger.info("certify_point t=%g: %s", t, certificate.conclusion_label())
        return certificate

    @staticmethod
    def certify_disk_point(mu: BeltramiField, zeta: complex, R0: float = 1.0,
                           schedule: Optional[Sequence[float]] = None,
                           options: Optional[QuadratureOptions] = None) -> RegularityCertificate:
        """
        Evaluate the disk conditions (i) and (ii) at a point of the unit circle.

        Integrals over T(zeta; r1, r2) are multiplied by 4, which makes them
        equal to the half-plane integrals of the pulled-back field at t = 0.

        Raises:
            DomainMismatch: If mu is not a disk field
            ValidationError: If |zeta| != 1
        """
        if mu.domain is not Domain.UNIT_DISK:
            raise DomainMismatch("certify_disk_point needs a unit-disk field")
        zeta = complex(zeta)
        if not is_unit(zeta, 1e-9):
            raise ValidationError(f"zeta must have unit modulus, got {zeta}")
        edges = _decreasing_edges(R0, schedule)
        certificate = _condition_certificate(
            mu, lambda lo, hi: SemiannulusSpec.disk(zeta, lo, hi), _DISK_CONDITIONS, edges, options,
            DISK_NORMALISATION,
        )
        certificate.input = {"field": mu.label, "params": dict(mu.params), "domain": mu.domain.value,
                             "zeta": [zeta.real, zeta.imag]}
        return certificate

    @staticmethod
    def certify_lipschitz(mu: BeltramiField, interval: Sequence[float], R: float = 1.0,
                          M_cap: Optional[float] = None, t_points: Optional[int] = None,
                          schedule: Optional[Sequence[float]] = None,
                          options: Optional[QuadratureOptions] = None) -> RegularityCertificate:
        """
        Scan the Lipschitz integral over A(t; r, R) ∩ H for t on a grid of I and r on a schedule.

        The integral is half the DPlusMinusOne integral and is accumulated
        piecewise from R inwards. A degenerate interval [t, t] scans one point.

        Returns:
            RegularityCertificate: LocallyLipschitz iff every evaluation converged and sup <= M_cap
        """
        if mu.domain is not Domain.UPPER_HALF_PLANE:
            raise DomainMismatch("certify_lipschitz needs a half-plane field")
        settings = get_settings()
        cap = settings.LIPSCHITZ_M_CAP if M_cap is None else M_cap
        grid = _t_grid(interval, t_points)
        edges = _decreasing_edges(R, schedule)

        per_t = map_ordered(
            lambda t: _pieces(mu, lambda lo, hi: SemiannulusSpec.half_plane(t, lo, hi),
                              [KernelKind.D_PLUS_MINUS_ONE], edges, options, 0.5)[0],
            grid,
        )
        sup_trace, reliable, warnings = [], [], []
        running = [0.0] * len(grid)
        ok = [True] * len(grid)
        for k, r in enumerate(edges[1:]):
            for i, pieces in enumerate(per_t):
                running[i] += pieces[k].value
                ok[i] = ok[i] and pieces[k].converged
                warnings.extend(pieces[k].warnings)
            sup_trace.append((r, max(running)))
            reliable.append(all(ok))
        observed = max(v for _, v in sup_trace)
        verdict = QuadratureService.judge_trace(sup_trace, reliable)

        certified = all(reliable) and observed <= cap
        if not all(reliable):
            warnings.append("Lipschitz scan: some integrals did not reach tolerance")
        certificate = RegularityCertificate(
            input={"field": mu.label, "params": dict(mu.params), "domain": mu.domain.value,
                   "interval": [float(interval[0]), float(interval[1])]},
            grids={"t_grid": grid, "schedule": list(edges[1:]), "R": R, "M_cap": cap},
            verdicts=[ConditionVerdict(name=ConditionName.LIPSCHITZ, verdict=verdict, bound=observed)],
            traces=[TraceRecord(name="Lipschitz:sup_over_t", points=sup_trace)],
            constants=DerivedConstants(M=observed),
            conclusion=Conclusion.LOCALLY_LIPSCHITZ if certified else Conclusion.NOT_CERTIFIED,
            warnings=_unique(warnings),
        )
        return certificate

    @staticmethod
    def certify_holder(mu: BeltramiField, interval: Sequence[float], R: float = 1.0,
                       t_points: Optional[int] = None, schedule: Optional[Sequence[float]] = None,
                       options: Optional[QuadratureOptions] = None) -> RegularityCertificate:
        """
        Estimate the weak Hölder exponent from the limsup of omega(t; r) over a t-grid.

        Per t, the limsup is the largest of the last three values, accepted when
        the trace converges or approaches from above. The exponent is
        alpha = 1 / (1 + max limsup + cauchy_tol), capped at 1. Uniformity in t is
        only checked on the grid; the certificate records that caveat.
        """
        if mu.domain is not Domain.UPPER_HALF_PLANE:
            raise DomainMismatch("certify_holder needs a half-plane field")
        tol = get_settings().CAUCHY_TOL
        grid = _t_grid(interval, t_points)
        radii = _decreasing_edges(R, schedule)[1:]
        jobs = [(t, r) for t in grid for r in radii]
        means = map_ordered(lambda job: QuadratureService.holder_mean(mu, job[0], job[1], options=options), jobs)

        traces, limsups, warnings = [], [], []
        undetermined = []
        max_trace = [(r, -math.inf) for r in radii]
        all_reliable = True
        for i, t in enumerate(grid):
            results = means[i * len(radii):(i + 1) * len(radii)]
            trace = [(r, m.value) for r, m in zip(radii, results)]
            reliable = [m.converged for m in results]
            all_reliable = all_reliable and all(reliable)
            warnings.extend(w for m in results for w in m.warnings)
            verdict = QuadratureService.judge_trace(trace, reliable, tol)
            tail = [v for _, v in trace[-3:]]
            settles = verdict.converges or all(b <= a + tol for a, b in zip(tail, tail[1:]))
            if settles and all(math.isfinite(v) for v in tail):
                limsups.append(max(tail))
            else:
                undetermined.append(t)
            traces.append(TraceRecord(name=f"omega(t={t:.6g})", points=trace))
            max_trace = [(r, max(current, v)) for (r, current), (_, v) in zip(max_trace, trace)]

        verdict = QuadratureService.judge_trace(max_trace, None, tol)
        certificate = RegularityCertificate(
            input={"field": mu.label, "params": dict(mu.params), "domain": mu.domain.value,
                   "interval": [float(interval[0]), float(interval[1])]},
            grids={"t_grid": grid, "schedule": radii, "R": R},
            traces=traces,
            warnings=warnings,
        )
        if len(grid) > 1:
            certificate.warnings.append(f"uniformity in t checked on a {len(grid)}-point grid only")
        if undetermined:
            certificate.warnings.append(f"omega trace does not settle at t = {undetermined}")
        if not all_reliable:
            certificate.warnings.append("Holder scan: some integrals did not reach tolerance")

        limsup = max(limsups) if limsups else None
        alpha = None
        if limsup is not None:
            denominator = 1.0 + limsup + tol
            alpha = 1.0 if denominator <= 1.0 else 1.0 / denominator
        certificate.verdicts.append(ConditionVerdict(name=ConditionName.HOLDER, verdict=verdict, bound=limsup))
        certificate.constants = DerivedConstants(alpha=alpha)
        if alpha is not None and not undetermined and all_reliable:
            certificate.conclusion = Conclusion.HOLDER
        certificate.warnings = _unique(certificate.warnings)
        return certificate

    @staticmethod
    def certify_infinity(mu: BeltramiField, r0: float = 1.0,
                         R_schedule: Optional[Sequence[float]] = None,
                         options: Optional[QuadratureOptions] = None) -> LimitVerdict:
        """
        Test continuity at infinity: (1/(log R)^2) times the InfinityKernel integral over A(0; r0, R) ∩ H.

        ConvergesTo a value within INFINITY_TOL of 0 certifies continuous extension.
        A trace entry is reliable while the summed piece errors, divided by
        (log R)^2, stay below INFINITY_ERROR_SHARE * INFINITY_TOL.

        Args:
            mu: Half-plane field
            r0: Inner radius
            R_schedule: Increasing radii (defaults to e^k, k = 1..INFINITY_LEVELS, beyond r0)
            options: Quadrature options
        """
        if mu.domain is not Domain.UPPER_HALF_PLANE:
            raise DomainMismatch("certify_infinity needs a half-plane field")
        if not r0 > 0:
            raise ValidationError(f"r0 must be positive, got {r0}")
        settings = get_settings()
        schedule = list(R_schedule) if R_schedule is not None else [
            math.exp(k) for k in range(1, settings.INFINITY_LEVELS + 1) if math.exp(k) > max(r0, 1.0)
        ]
        validate_schedule(schedule)
        if not (schedule[0] < schedule[-1] and schedule[0] > max(r0, 1.0)):
            raise ValidationError("R schedule must increase from above max(r0, 1)")
        edges = [float(r0)] + [float(R) for R in schedule]
        # per-piece tolerance: a share of INFINITY_TOL (log R_1)^2 split over the pieces
        base = options or QuadratureOptions.from_settings()
        budget = INFINITY_ERROR_SHARE * settings.INFINITY_TOL * math.log(schedule[0]) ** 2 / len(schedule)
        piece_options = base.model_copy(update={"abs_tol": max(base.abs_tol, budget)})
        pieces = _pieces(mu, lambda lo, hi: SemiannulusSpec.half_plane(0.0, lo, hi),
                         [KernelKind.INFINITY_KERNEL], edges, piece_options)[0]
        trace, reliable = [], []
        total, error = 0.0, 0.0
        for R, piece in zip(schedule, pieces):
            total += piece.value
            error += piece.abs_error_estimate
            scale = math.log(R) ** 2
            trace.append((R, total / scale))
            reliable.append(error / scale <= INFINITY_ERROR_SHARE * settings.INFINITY_TOL)
        verdict = QuadratureService.judge_trace(trace, reliable, settings.INFINITY_TOL)
        warnings = _unique([w for piece in pieces for w in piece.warnings])
        return verdict.model_copy(update={"warnings": warnings})

    @staticmethod
    def infinity_certificate(mu: BeltramiField, r0: float = 1.0,
                             R_schedule: Optional[Sequence[float]] = None,
                             options: Optional[QuadratureOptions] = None) -> RegularityCertificate:
        """
        Certificate for the point at infinity.

        Besides the normalised integral, it traces (Q_mu(0; r0, R) - 1) / log R,
        which tends to 0 exactly when Q = 1 + o(log R).
        """
        settings = get_settings()
        verdict = CertifyService.certify_infinity(mu, r0, R_schedule, options)
        schedule = [R for R, _ in verdict.trace]
        q_excess = map_ordered(
            lambda R: QuadratureService.q_modulus_ratio(mu, 0.0, r0, R, options).value - 1.0, schedule
        )
        q_trace = [(R, q / math.log(R)) for R, q in zip(schedule, q_excess)]
        certified = verdict.converges_to(0.0, settings.INFINITY_TOL)
        return RegularityCertificate(
            input={"field": mu.label, "params": dict(mu.params), "domain": mu.domain.value, "point": "inf"},
            grids={"R_schedule": schedule, "r0": r0},
            verdicts=[ConditionVerdict(name=ConditionName.INFINITY, verdict=verdict)],
            traces=[TraceRecord(name="Infinity:normalised", parameter="R", points=verdict.trace),
                    TraceRecord(name="Infinity:Q_excess_per_log", parameter="R", points=q_trace)],
            conclusion=Conclusion.CONTINUOUS_EXTENSION if certified else Conclusion.NOT_CERTIFIED,
            warnings=list(verdict.warnings),
        )

    @staticmethod
    def extension_divergence_check(map_fn: Callable[[np.ndarray], np.ndarray], point, R: float = 1.0,
                                   schedule: Optional[Sequence[float]] = None,
                                   resolution: Optional[int] = None,
                                   domain: Domain = Domain.UNIT_DISK) -> LimitVerdict:
        """
        Test mod f(T(zeta; r, R)) -> infinity (or mod f(A(t; r, R) ∩ H) for half-plane maps).

        The traced value is the primal modulus, a lower bound of the image
        modulus. Diverges when the tail slope against log(1/r) reaches
        EXTENSION_MIN_SLOPE with increasing values; a folding mesh or a failed
        solve makes the verdict Inconclusive. A tail settling to within
        EXTENSION_CAUCHY_TOL is reported as ConvergesTo, the bounded case.

        Args:
            map_fn: Vectorised homeomorphism
            point: zeta on the unit circle, or real t
            R: Outer radius
            schedule: Inner radii decreasing to 0 (defaults to R 2^{-k}, k = 1..EXTENSION_LEVELS)
            resolution: Cells along each image region
            domain: Domain of the map

        Returns:
            LimitVerdict: Trace of (r, mod) and the tail slope
        """
        settings = get_settings()
        if schedule is None:
            schedule = [R * 2.0 ** (-k) for k in range(1, settings.EXTENSION_LEVELS + 1)]
        edges = _decreasing_edges(R, schedule)
        m = resolution or settings.EXTENSION_CELLS
        if domain is Domain.UNIT_DISK:
            zeta = complex(point)
            if not is_unit(zeta, 1e-9):
                raise ValidationError(f"boundary point must lie on the unit circle, got {point}")

            def spec_for(r):
                return SemiannulusSpec.disk(zeta, r, R)
        else:
            def spec_for(r):
                return SemiannulusSpec.half_plane(float(point), r, R)

        def measure(r):
            spec = spec_for(r)
            n = max(8, math.ceil(settings.EXTENSION_CELLS_PER_LOG * spec.log_ratio))
            try:
                mesh = ModulusService.mesh_region(map_fn, spec, n, m, grading="mercator",
                                                  inset=settings.MESH_INSET, label="map")
                return ModulusService.discrete_modulus(mesh).mod_primal, None
            except (DegenerateCell, SolveFailure) as exc:
                return math.nan, f"r={r:.6g}: {exc.detail}"

        outcomes = map_ordered(measure, edges[1:])
        trace = [(r, value) for r, (value, _) in zip(edges[1:], outcomes)]
        warnings = [message for _, message in outcomes if message]
        for message in warnings:
            logger.warning("extension check: %s", message)

        finite = [(r, v) for r, v in trace if math.isfinite(v)]
        tail = finite[len(finite) // 2:]
        slope = QuadratureService.trace_slope(tail)
        if warnings:
            return LimitVerdict(status=VerdictStatus.INCONCLUSIVE, trace=trace, slope=slope,
                                reliable=False, warnings=warnings)
        values = [v for _, v in tail]
        increasing = all(b > a for a, b in zip(values, values[1:]))
        if slope is not None and slope >= settings.EXTENSION_MIN_SLOPE and increasing:
            return LimitVerdict(status=VerdictStatus.DIVERGES, trace=trace, slope=slope)
        verdict = QuadratureService.judge_trace(trace, cauchy_tol=settings.EXTENSION_CAUCHY_TOL)
        if verdict.diverges:
            verdict = verdict.model_copy(update={"status": VerdictStatus.INCONCLUSIVE})
        return verdict.model_copy(update={"slope": slope})

    @staticmethod
    def empirical_boundary_exponent(named: NamedMap, t: float,
                                    h_schedule: Optional[Sequence[float]] = None) -> BoundaryExponent:
        """
        Fit log |f(t ± h) - f(t)| against log h, taking the worse side at each h.

        deriv_hat is |f(t ± h) - f(t)| / h at the smallest h, reported when alpha_hat is close to 1.

        Raises:
            UnsupportedSpec: If the map has no boundary function
            ValidationError: If fewer than two increments are positive
        """
        if named.boundary is None:
            raise UnsupportedSpec(f"{named.name} has no boundary map")
        settings = get_settings()
        steps = np.asarray(h_schedule if h_schedule is not None else [2.0 ** (-k) for k in range(4, 25)],
                           dtype=float)
        if np.any(steps <= 0):
            raise ValidationError("h schedule must be positive")
        base = np.asarray(named.boundary(np.array([t])))[0]
        ahead = np.abs(np.asarray(named.boundary(t + steps)) - base)
        behind = np.abs(np.asarray(named.boundary(t - steps)) - base)
        increments = np.maximum(ahead, behind)
        usable = increments > 0
        if np.count_nonzero(usable) < 2:
            raise ValidationError("boundary increments vanish; nothing to fit")
        x, y = np.log(steps[usable]), np.log(increments[usable])
        coefficients = np.polyfit(x, y, 1)
        residual = float(np.sqrt(np.mean((np.polyval(coefficients, x) - y) ** 2)))
        alpha_hat = float(coefficients[0])
        smallest = int(np.argmin(steps))
        deriv_hat = None
        if abs(alpha_hat - 1.0) <= DERIVATIVE_ALPHA_TOL:
            deriv_hat = float(increments[smallest] / steps[smallest])
        warnings = []
        poor = residual > settings.FIT_RESIDUAL_MAX
        if poor:
            message = f"PoorFit: log-log residual {residual:.3g} exceeds {settings.FIT_RESIDUAL_MAX}"
            logger.warning(message)
            warnings.append(message)
        return BoundaryExponent(alpha_hat=alpha_hat, deriv_hat=deriv_hat, residual=residual, poor_fit=poor,
                                trace=[(float(h), float(d)) for h, d in zip(steps, increments)],
                                warnings=warnings)

    @staticmethod
    def carleson_certify(mu: BeltramiField, levels: Optional[int] = None,
                         samples: Optional[int] = None) -> LimitVerdict:
        """
        Probe the Carleson integral of eta(s)/s over [eps, 1] as eps = 2^{-k} -> 0.

        Divergence is judged against CARLESON_DIVERGE_THRESHOLD: eta <= 1 keeps
        the integral below log(1/eps).
        """
        settings = get_settings()
        levels = levels or settings.SCHEDULE_LEVELS
        edges = [2.0 ** (-k) for k in range(levels + 1)]
        try:
            pieces = QuadratureService.carleson_pieces(mu, edges, samples=samples)
        except GridTooCoarse as exc:
            logger.warning("carleson: %s", exc.detail)
            return LimitVerdict(status=VerdictStatus.INCONCLUSIVE, reliable=False, warnings=[exc.detail])
        trace, total = [], 0.0
        for eps, piece in zip(edges[1:], pieces):
            total += piece.value
            trace.append((eps, total))
        return QuadratureService.judge_trace(trace, None, settings.CAUCHY_TOL,
                                             settings.CARLESON_DIVERGE_THRESHOLD)
