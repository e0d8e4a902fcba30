"""
Certify task.
Runs a regularity certificate, the modulus divergence check or the empirical
boundary exponent.
"""

import enum
import math
from typing import List, Optional, Tuple

from pydantic import ConfigDict, Field

from app.middleware.run_context import RunContext
from app.models.certificate import ConditionName, ConditionVerdict, RegularityCertificate, TraceRecord
from app.models.field import BeltramiField, Domain
from app.models.scenario import TaskKind
from app.routes.router import QuadratureParams, TaskOutput, TaskRouter, point
from app.services.certify_service import CertifyService
from app.services.gallery_service import GalleryService
from app.utils.errors import BadParams

router = TaskRouter()


class CertifyMode(str, enum.Enum):
    """Which certificate to produce."""
    POINT = "point"
    DISK_POINT = "disk_point"
    LIPSCHITZ = "lipschitz"
    HOLDER = "holder"
    INFINITY = "infinity"
    CARLESON = "carleson"
    EXTENSION = "extension"
    EXPONENT = "exponent"


class CertifyParams(QuadratureParams):
    """
    Parameters of the certify task.

    levels shortens the default schedule R0 2^{-k}; an explicit schedule wins.
    The extension and exponent modes work on the gallery map named by the
    scenario field.
    """
    model_config = ConfigDict(extra="forbid")

    mode: CertifyMode = CertifyMode.POINT
    t: float = 0.0
    zeta: Tuple[float, float] = (1.0, 0.0)
    interval: Optional[Tuple[float, float]] = None
    R0: float = Field(default=1.0, gt=0.0)
    levels: Optional[int] = Field(default=None, ge=4)
    schedule: Optional[List[float]] = None
    t_points: Optional[int] = Field(default=None, ge=1)
    M_cap: Optional[float] = None
    brakalova_jenkins: bool = True
    sectors: List[Tuple[float, float]] = Field(default_factory=list)
    resolution: Optional[int] = Field(default=None, ge=8)
    h_schedule: Optional[List[float]] = None

    def radii(self) -> Optional[List[float]]:
        if self.schedule is not None:
            return list(self.schedule)
        if self.levels is not None:
            return [self.R0 * 2.0 ** (-k) for k in range(1, self.levels + 1)]
        return None


def _verdict_certificate(name: ConditionName, verdict, parameter: str = "r") -> RegularityCertificate:
    return RegularityCertificate(
        verdicts=[ConditionVerdict(name=name, verdict=verdict)],
        traces=[TraceRecord(name=name.value, parameter=parameter, points=verdict.trace)],
        warnings=list(verdict.warnings),
    )


def _trace_rows(certificate: RegularityCertificate) -> List[dict]:
    return [
        {"trace": trace.name, "parameter": trace.parameter, "at": at, "value": value}
        for trace in certificate.traces
        for at, value in trace.points
    ]


def _certificate(params: CertifyParams, field: Optional[BeltramiField], scenario_field) -> RegularityCertificate:
    options = params.quadrature_options()
    mode = params.mode
    if mode in (CertifyMode.EXTENSION, CertifyMode.EXPONENT):
        if scenario_field is None or scenario_field.name not in GalleryService.names():
            raise BadParams(f"mode '{mode.value}' needs a gallery map as the scenario field")
        named = GalleryService.gallery_map(scenario_field.name, scenario_field.params, scenario_field.domain)
        if mode is CertifyMode.EXPONENT:
            exponent = CertifyService.empirical_boundary_exponent(named, params.t, params.h_schedule)
            certificate = RegularityCertificate(
                traces=[TraceRecord(name="boundary_increment", parameter="h", points=exponent.trace)],
                warnings=list(exponent.warnings),
            )
            certificate.constants.alpha = exponent.alpha_hat
            certificate.grids = {"alpha_hat": exponent.alpha_hat, "deriv_hat": exponent.deriv_hat,
                                 "residual": exponent.residual, "poor_fit": exponent.poor_fit}
            return certificate
        at = point(params.zeta) if named.domain is Domain.UNIT_DISK else params.t
        verdict = CertifyService.extension_divergence_check(named.forward, at, params.R0, params.radii(),
                                                            params.resolution, named.domain)
        return _verdict_certificate(ConditionName.EXTENSION, verdict)

    if field is None:
        raise BadParams(f"mode '{mode.value}' needs a field")
    if mode is CertifyMode.POINT:
        return CertifyService.certify_point(field, params.t, params.R0, params.radii(), options,
                                            params.brakalova_jenkins, params.sectors)
    if mode is CertifyMode.DISK_POINT:
        return CertifyService.certify_disk_point(field, point(params.zeta), params.R0, params.radii(), options)
    if mode in (CertifyMode.LIPSCHITZ, CertifyMode.HOLDER):
        interval = params.interval or (params.t, params.t)
        if mode is CertifyMode.LIPSCHITZ:
            return CertifyService.certify_lipschitz(field, interval, params.R0, params.M_cap, params.t_points,
                                                    params.radii(), options)
        return CertifyService.certify_holder(field, interval, params.R0, params.t_points, params.radii(), options)
    if mode is CertifyMode.INFINITY:
        schedule = None
        if params.levels is not None:
            schedule = [math.exp(k) for k in range(1, params.levels + 1) if math.exp(k) > max(params.R0, 1.0)]
        return CertifyService.infinity_certificate(field, params.R0, params.schedule or schedule, options)
    verdict = CertifyService.carleson_certify(field, params.levels)
    return _verdict_certificate(ConditionName.CARLESON, verdict, parameter="eps")


@router.task(TaskKind.CERTIFY, CertifyParams)
def run_certify(params: CertifyParams, field: Optional[BeltramiField], context: RunContext) -> TaskOutput:
    """JSON certificate; CSV carries one row per trace point."""
    certificate = _certificate(params, field, context.scenario_field)
    for message in certificate.warnings:
        context.warn(message)
    return TaskOutput(document={"certificate": certificate.to_document()}, rows=_trace_rows(certificate))
