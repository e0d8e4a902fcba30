"""
Certificate tests for the Semiannulus Regularity Toolkit.
Tests point, disk, Lipschitz, Hölder and infinity certificates, the Carleson
test, the modulus divergence check and the empirical boundary exponent.
"""

import math

import pytest

from app.models.certificate import ConditionName, Conclusion
from app.models.field import Domain
from app.models.mesh import ModulusEstimate
from app.models.quadrature import QuadratureOptions, VerdictStatus
from app.services.certify_service import CertifyService
from app.services.field_service import FieldService
from app.services.gallery_service import GalleryService
from app.services.modulus_service import ModulusService
from app.utils.errors import DomainMismatch, ValidationError


def statuses(certificate):
    return [(entry.name.value[-2:], entry.verdict.status) for entry in certificate.verdicts]


class TestCertifyPoint:
    """Test suite for the differentiability certificate at a boundary point."""

    def test_radial_stretch_is_not_differentiable(self, fast_options, short_schedule):
        """Test Cond2 density 3 pi/8 and Cond1 density pi/8 for K = 2."""
        field = FieldService.builtin("radial_stretch", {"K": 2.0})
        certificate = CertifyService.certify_point(field, 0.0, schedule=short_schedule, options=fast_options)
        cond1 = certificate.verdict(ConditionName.COND1)
        cond2 = certificate.verdict(ConditionName.COND2)
        assert cond1.converges_to(math.pi / 8.0, 1e-8)
        assert cond2.converges_to(3.0 * math.pi / 8.0, 1e-8)
        assert certificate.conclusion is Conclusion.NOT_CERTIFIED

    def test_tanh_strip_is_differentiable(self, fast_options, short_schedule):
        """Test that mu = 0 below the strip height certifies differentiability."""
        field = FieldService.builtin("tanh_strip")
        certificate = CertifyService.certify_point(field, 0.0, R0=0.9,
                                                   schedule=[0.9 * 2.0 ** (-k) for k in range(1, 9)],
                                                   options=fast_options)
        assert certificate.conclusion is Conclusion.DIFFERENTIABLE
        assert certificate.verdict(ConditionName.BRAKALOVA_JENKINS).converges_to(0.0, 1e-12)

    def test_shear_cond1_diverges(self):
        """Test that the shear coefficient makes Cond1 diverge."""
        field = FieldService.builtin("shear")
        options = QuadratureOptions.from_settings(max_cells=2 ** 18)
        certificate = CertifyService.certify_point(field, 0.0, schedule=[2.0 ** (-k) for k in range(1, 17)],
                                                   options=options, brakalova_jenkins=False)
        assert certificate.verdict(ConditionName.COND1).status is VerdictStatus.DIVERGES
        assert certificate.conclusion is Conclusion.NOT_CERTIFIED

    def test_traces_and_grids(self, fast_options, short_schedule):
        """Test that the certificate records its schedule and traces."""
        field = FieldService.builtin("zero")
        certificate = CertifyService.certify_point(field, 0.5, schedule=short_schedule, options=fast_options,
                                                   sectors=[(0.0, math.pi / 2.0)])
        assert certificate.grids["schedule"] == short_schedule
        names = [trace.name for trace in certificate.traces]
        assert "Cond1:density" in names
        assert "G[0,1.5708]" in names
        assert "H[0,1.5708]" in names
        document = certificate.to_document()
        assert document["conclusion"] == "Differentiable"
        assert document["input"]["t"] == 0.5

    def test_schedule_must_start_below_R0(self, fast_options):
        """Test that the schedule must decrease from below R0."""
        field = FieldService.builtin("zero")
        with pytest.raises(ValidationError):
            CertifyService.certify_point(field, 0.0, R0=0.5, schedule=[1.0, 0.5, 0.25, 0.125],
                                         options=fast_options)

    def test_needs_half_plane_field(self, fast_options):
        """Test that a disk field is rejected."""
        field = FieldService.builtin("radial_twist")
        with pytest.raises(DomainMismatch):
            CertifyService.certify_point(field, 0.0, options=fast_options)


class TestCertifyDiskPoint:
    """Test suite for the disk certificate and its transfer to the half-plane."""

    @pytest.mark.parametrize("name, params", [
        ("radial_stretch", {"K": 2.0, "domain": 1.0}),
        ("radial_stretch", {"K": 0.5, "domain": 1.0}),
        ("zero", {"domain": 1.0}),
        ("radial_twist", {}),
        ("prime_end_twist", {}),
    ])
    def test_matches_transferred_half_plane_certificate(self, name, params, fast_options, short_schedule):
        """Test that disk conditions agree with the half-plane conditions of the transferred field."""
        disk_field = FieldService.builtin(name, params)
        disk = CertifyService.certify_disk_point(disk_field, 1.0, schedule=short_schedule, options=fast_options)
        flat = CertifyService.certify_point(FieldService.pullback_to_halfplane(disk_field, 1.0), 0.0,
                                            schedule=short_schedule, options=fast_options, brakalova_jenkins=False)
        assert statuses(disk) == [("_i", flat.verdicts[0].verdict.status),
                                  ("ii", flat.verdicts[1].verdict.status)]
        assert disk.conclusion is flat.conclusion

    @pytest.mark.slow
    @pytest.mark.parametrize("name, params", [
        ("radial_stretch", {"K": 2.0, "domain": 1.0}),
        ("radial_stretch", {"K": 0.5, "domain": 1.0}),
        ("radial_twist", {}),
        ("prime_end_twist", {}),
    ])
    def test_transfer_on_default_schedule(self, name, params, fast_options):
        """Test the transfer of every disk gallery field over the default schedule."""
        disk_field = FieldService.builtin(name, params)
        disk = CertifyService.certify_disk_point(disk_field, 1.0, options=fast_options)
        flat = CertifyService.certify_point(FieldService.pullback_to_halfplane(disk_field, 1.0), 0.0,
                                            options=fast_options, brakalova_jenkins=False)
        assert statuses(disk) == [("_i", flat.verdicts[0].verdict.status),
                                  ("ii", flat.verdicts[1].verdict.status)]
        assert disk.conclusion is flat.conclusion

    def test_zeta_must_be_unimodular(self, fast_options):
        """Test that zeta off the circle is rejected."""
        field = FieldService.builtin("zero", {"domain": 1.0})
        with pytest.raises(ValidationError):
            CertifyService.certify_disk_point(field, 0.5, options=fast_options)


class TestIntervalCertificates:
    """Test suite for the Lipschitz and Hölder scans."""

    def test_radial_stretch_is_lipschitz(self, fast_options):
        """Test that K = 2 is locally Lipschitz at 0."""
        field = FieldService.builtin("radial_stretch", {"K": 2.0})
        certificate = CertifyService.certify_lipschitz(field, (0.0, 0.0), options=fast_options,
                                                       schedule=[2.0 ** (-k) for k in range(1, 13)])
        assert certificate.conclusion is Conclusion.LOCALLY_LIPSCHITZ
        assert certificate.constants.M <= 0.0

    def test_inverse_stretch_is_not_lipschitz(self, fast_options):
        """Test that K = 1/2 exceeds the cap."""
        field = FieldService.builtin("radial_stretch", {"K": 0.5})
        certificate = CertifyService.certify_lipschitz(field, (0.0, 0.0), options=fast_options,
                                                       schedule=[2.0 ** (-k) for k in range(1, 13)])
        assert certificate.conclusion is Conclusion.NOT_CERTIFIED
        assert certificate.constants.M > 10.0

    def test_holder_exponent_capped(self, fast_options, short_schedule):
        """Test that omega = -1/2 caps alpha at 1."""
        field = FieldService.builtin("radial_stretch", {"K": 2.0})
        certificate = CertifyService.certify_holder(field, (0.0, 0.0), schedule=short_schedule,
                                                    options=fast_options)
        assert certificate.conclusion is Conclusion.HOLDER
        assert certificate.constants.alpha == 1.0

    def test_holder_exponent_of_inverse_stretch(self, fast_options, short_schedule):
        """Test alpha = 1 / (2 + tol) for omega = 1."""
        field = FieldService.builtin("radial_stretch", {"K": 0.5})
        certificate = CertifyService.certify_holder(field, (0.0, 0.0), schedule=short_schedule,
                                                    options=fast_options)
        assert certificate.constants.alpha == pytest.approx(1.0 / (2.0 + 1e-4), rel=1e-8)
        assert certificate.conclusion_label().startswith("Holder(")

    def test_holder_of_zero_field(self, fast_options, short_schedule):
        """Test alpha close to 1 for mu = 0."""
        certificate = CertifyService.certify_holder(FieldService.builtin("zero"), (0.0, 0.0),
                                                    schedule=short_schedule, options=fast_options)
        assert certificate.constants.alpha == pytest.approx(1.0, abs=1e-3)

    def test_interval_grid(self, fast_options, short_schedule):
        """Test the t-grid over an interval and its uniformity caveat."""
        certificate = CertifyService.certify_holder(FieldService.builtin("zero"), (-1.0, 1.0), t_points=3,
                                                    schedule=short_schedule, options=fast_options)
        assert certificate.grids["t_grid"] == [-1.0, 0.0, 1.0]
        assert any("3-point grid" in message for message in certificate.warnings)

    def test_reversed_interval(self, fast_options):
        """Test that a > b is rejected."""
        with pytest.raises(ValidationError):
            CertifyService.certify_lipschitz(FieldService.builtin("zero"), (1.0, 0.0), options=fast_options)


class TestInfinity:
    """Test suite for continuity at infinity."""

    def test_zero_field(self, fast_options):
        """Test that mu = 0 converges to 0."""
        verdict = CertifyService.certify_infinity(FieldService.builtin("zero"), options=fast_options)
        assert verdict.converges_to(0.0, 1e-2)

    def test_tanh_strip(self, fast_options):
        """Test that the tanh strip is not certified at infinity."""
        verdict = CertifyService.certify_infinity(FieldService.builtin("tanh_strip"), options=fast_options)
        assert not verdict.converges_to(0.0, 1e-2)

    def test_compactly_supported_field(self, fast_options):
        """Test that a bump supported in |z| < 3.5 converges to 0 at infinity."""
        field = FieldService.builtin("bump", {"center_im": 2.0, "radius": 1.5, "amplitude": 0.3})
        verdict = CertifyService.certify_infinity(field, options=fast_options)
        assert verdict.reliable
        assert verdict.converges_to(0.0, 1e-2)

    def test_compactly_supported_field_at_default_cap(self):
        """Test the same bump under the default cell cap."""
        field = FieldService.builtin("bump", {"center_im": 2.0, "radius": 1.5, "amplitude": 0.3})
        verdict = CertifyService.certify_infinity(field)
        assert verdict.converges_to(0.0, 1e-2)

    def test_tanh_strip_trace_is_finite(self, fast_options):
        """Test that the tanh strip trace stays finite out to e^12."""
        verdict = CertifyService.certify_infinity(FieldService.builtin("tanh_strip"), options=fast_options)
        assert all(math.isfinite(value) for _, value in verdict.trace)

    def test_certificate(self, fast_options):
        """Test the infinity certificate document."""
        certificate = CertifyService.infinity_certificate(FieldService.builtin("zero"), options=fast_options)
        assert certificate.conclusion is Conclusion.CONTINUOUS_EXTENSION
        assert certificate.traces[1].parameter == "R"


class TestCarleson:
    """Test suite for the Carleson test."""

    def test_strip_ramp_converges(self):
        """Test that eta(s) = s integrates to 1."""
        verdict = CertifyService.carleson_certify(FieldService.builtin("strip_ramp"))
        assert verdict.converges_to(1.0, 1e-4)

    def test_shear_diverges(self):
        """Test that the shear coefficient fails the Carleson condition."""
        verdict = CertifyService.carleson_certify(FieldService.builtin("shear"))
        assert verdict.status is VerdictStatus.DIVERGES


class TestMapChecks:
    """Test suite for checks working on the maps themselves."""

    def test_extension_of_identity_on_disk(self):
        """Test that image moduli of the identity grow like log(1/r)."""
        verdict = CertifyService.extension_divergence_check(lambda z: z, 1.0, resolution=16,
                                                            schedule=[2.0 ** (-k) for k in range(1, 7)])
        assert verdict.status is VerdictStatus.DIVERGES
        assert verdict.slope == pytest.approx(1.0, abs=0.1)

    def test_tanh_strip_exponent(self):
        """Test alpha = 1 and derivative pi/4 at 0."""
        exponent = CertifyService.empirical_boundary_exponent(GalleryService.gallery_map("tanh_strip"), 0.0)
        assert exponent.alpha_hat == pytest.approx(1.0, abs=1e-3)
        assert exponent.deriv_hat == pytest.approx(math.pi / 4.0, abs=1e-3)
        assert not exponent.poor_fit

    def test_radial_stretch_exponent(self):
        """Test alpha = K for the boundary map t -> t^K."""
        named = GalleryService.gallery_map("radial_stretch", {"K": 2.0}, Domain.UPPER_HALF_PLANE)
        exponent = CertifyService.empirical_boundary_exponent(named, 0.0)
        assert exponent.alpha_hat == pytest.approx(2.0, abs=1e-9)
        assert exponent.deriv_hat is None

    def test_inverse_stretch_exponents(self, fast_options, short_schedule):
        """Test Hölder alpha and the empirical boundary exponent 1/2 for K = 1/2."""
        field = FieldService.builtin("radial_stretch", {"K": 0.5})
        certificate = CertifyService.certify_holder(field, (0.0, 0.0), schedule=short_schedule,
                                                    options=fast_options)
        named = GalleryService.gallery_map("radial_stretch", {"K": 0.5}, Domain.UPPER_HALF_PLANE)
        exponent = CertifyService.empirical_boundary_exponent(named, 0.0)
        assert certificate.constants.alpha == pytest.approx(0.5, abs=0.02)
        assert exponent.alpha_hat == pytest.approx(0.5, abs=0.02)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["radial_twist", "prime_end_twist"])
    def test_twist_image_moduli_stay_bounded(self, name):
        """Test that twisted image moduli do not diverge at zeta = 1."""
        named = GalleryService.gallery_map(name)
        verdict = CertifyService.extension_divergence_check(named.forward, 1.0)
        assert verdict.status is not VerdictStatus.DIVERGES
        assert verdict.slope is not None
        assert verdict.slope <= 0.1

    def test_bounded_trace_converges(self, monkeypatch):
        """Test that a settled image modulus trace is reported as ConvergesTo."""
        monkeypatch.setattr(ModulusService, "discrete_modulus",
                            staticmethod(lambda mesh: ModulusEstimate.from_energies(1.0, 1.0)))
        verdict = CertifyService.extension_divergence_check(lambda z: z, 1.0, resolution=16,
                                                            schedule=[2.0 ** (-k) for k in range(1, 7)])
        assert verdict.status is VerdictStatus.CONVERGES_TO
        assert verdict.value == pytest.approx(math.pi)
        assert verdict.slope == pytest.approx(0.0, abs=1e-12)
