"""
Quadrature tests for the Semiannulus Regularity Toolkit.
Tests the annulus integrals, Q ratios, Hölder means, the Carleson integral
and the limit probe.
"""

import math

import pytest

from app.models.quadrature import KernelKind, QuadratureOptions, VerdictStatus
from app.models.semiannulus import SemiannulusSpec
from app.services.field_service import FieldService
from app.services.quadrature_service import QuadratureService
from app.utils.errors import DomainMismatch, ToleranceNotReached, ValidationError


@pytest.fixture
def stretch_two():
    """Radial stretch with K = 2, mu = (1/3) z / conj z."""
    return FieldService.builtin("radial_stretch", {"K": 2.0})


class TestAnnulusIntegral:
    """Test suite for the kernel integrals."""

    def test_zero_field_vanishes(self, fast_options):
        """Test that every half-plane kernel integrates mu = 0 to 0."""
        field = FieldService.builtin("zero")
        spec = SemiannulusSpec.half_plane(0.5, 0.01, 1.0)
        for kernel in (KernelKind.D_PLUS_MINUS_ONE, KernelKind.SQUARED_MODULUS, KernelKind.REAL_QUADRATIC):
            result = QuadratureService.annulus_integral(field, spec, kernel, fast_options)
            assert result.value == 0.0
            assert result.converged

    def test_radial_stretch_squared_modulus(self, stretch_two, fast_options):
        """Test the SquaredModulus integral pi/8 log(R/r) for K = 2."""
        spec = SemiannulusSpec.half_plane(0.0, 0.01, 1.0)
        result = QuadratureService.annulus_integral(stretch_two, spec, KernelKind.SQUARED_MODULUS, fast_options)
        assert result.value == pytest.approx(math.pi / 8.0 * math.log(100.0), rel=1e-10)

    def test_radial_stretch_real_quadratic(self, stretch_two, fast_options):
        """Test the RealQuadratic integral 3 pi/8 log(R/r) for K = 2."""
        spec = SemiannulusSpec.half_plane(0.0, 0.25, 1.0)
        result = QuadratureService.annulus_integral(stretch_two, spec, KernelKind.REAL_QUADRATIC, fast_options)
        assert result.value == pytest.approx(3.0 * math.pi / 8.0 * math.log(4.0), rel=1e-10)

    def test_sector_restriction(self, stretch_two, fast_options):
        """Test that a half sector carries half of a rotation-invariant integral."""
        whole = SemiannulusSpec.half_plane(0.0, 0.1, 1.0)
        half = SemiannulusSpec.half_plane(0.0, 0.1, 1.0, sector=(0.0, math.pi / 2.0))
        full = QuadratureService.annulus_integral(stretch_two, whole, KernelKind.SQUARED_MODULUS, fast_options)
        part = QuadratureService.annulus_integral(stretch_two, half, KernelKind.SQUARED_MODULUS, fast_options)
        assert part.value == pytest.approx(full.value / 2.0, rel=1e-10)

    def test_domain_mismatch(self, stretch_two, fast_options):
        """Test that a disk kernel on a half-plane spec is rejected."""
        spec = SemiannulusSpec.half_plane(0.0, 0.1, 1.0)
        with pytest.raises(DomainMismatch):
            QuadratureService.annulus_integral(stretch_two, spec, KernelKind.DISK_SQUARED, fast_options)

    def test_strict_cell_cap(self):
        """Test that strict mode raises when the cap stops refinement."""
        field = FieldService.builtin("shear")
        options = QuadratureOptions.from_settings(max_cells=64)
        spec = SemiannulusSpec.half_plane(0.0, 0.01, 0.3)
        with pytest.raises(ToleranceNotReached):
            QuadratureService.annulus_integral(field, spec, KernelKind.D_PLUS_MINUS_ONE, options, strict=True)

    def test_cell_cap_is_flagged(self):
        """Test that a capped result is flagged rather than raised by default."""
        field = FieldService.builtin("shear")
        options = QuadratureOptions.from_settings(max_cells=64)
        spec = SemiannulusSpec.half_plane(0.0, 0.01, 0.3)
        result = QuadratureService.annulus_integral(field, spec, KernelKind.D_PLUS_MINUS_ONE, options)
        assert not result.converged
        assert result.warnings

    def test_disk_kernel_of_transferred_field(self, fast_options):
        """Test that 4 x the disk integral equals the half-plane integral of the transferred field."""
        disk_field = FieldService.builtin("radial_stretch", {"K": 2.0, "domain": 1.0})
        pulled = FieldService.pullback_to_halfplane(disk_field, 1.0)
        disk = QuadratureService.annulus_integral(disk_field, SemiannulusSpec.disk(1.0, 0.1, 0.5),
                                                  KernelKind.DISK_SQUARED, fast_options)
        flat = QuadratureService.annulus_integral(pulled, SemiannulusSpec.half_plane(0.0, 0.1, 0.5),
                                                  KernelKind.SQUARED_MODULUS, fast_options)
        assert 4.0 * disk.value == pytest.approx(flat.value, rel=1e-9)


class TestModulusRatio:
    """Test suite for Q_mu and omega."""

    def test_radial_stretch_q(self, stretch_two, fast_options):
        """Test Q_mu = 1/K and Q_{-mu} = K for the radial stretch."""
        q = QuadratureService.q_modulus_ratio(stretch_two, 0.0, 0.01, 1.0, fast_options)
        q_neg = QuadratureService.q_modulus_ratio(stretch_two.negated(), 0.0, 0.01, 1.0, fast_options)
        assert q.value == pytest.approx(0.5, abs=1e-10)
        assert q_neg.value == pytest.approx(2.0, abs=1e-10)

    def test_holder_mean_of_radial_stretch(self, stretch_two, fast_options):
        """Test omega = 1/K - 1 for the radial stretch."""
        result = QuadratureService.holder_mean(stretch_two, 0.0, 0.5, options=fast_options)
        assert result.value == pytest.approx(-0.5, abs=1e-10)

    def test_holder_mean_lower_bound(self, fast_options):
        """Test omega >= -1 for a rough field."""
        field = FieldService.builtin("shear")
        result = QuadratureService.holder_mean(field, 0.0, 0.2, options=fast_options)
        assert result.value >= -1.0 - result.abs_error_estimate

    def test_holder_mean_radii(self, stretch_two):
        """Test that the cut-off must lie below r."""
        with pytest.raises(ValidationError):
            QuadratureService.holder_mean(stretch_two, 0.0, 0.5, inner=0.5)

    def test_omega_identity(self, fast_options):
        """Test (Q - 1) log(R/r) = [omega(R) - omega(r)]/2 + int omega ds/s for a bump field."""
        field = FieldService.builtin("bump", {"center_re": 0.2, "center_im": 0.3, "radius": 0.25,
                                              "amplitude": 0.4})
        identity = QuadratureService.omega_identity(field, 0.0, 0.05, 1.0, options=fast_options)
        assert identity.difference <= max(1e-4, 10.0 * identity.error_bound)

    def test_omega_identity_radial_stretch(self, stretch_two, fast_options):
        """Test both sides of the identity for a constant omega."""
        identity = QuadratureService.omega_identity(stretch_two, 0.0, 0.1, 1.0, options=fast_options)
        assert identity.lhs == pytest.approx(-0.5 * math.log(10.0), abs=1e-8)
        assert identity.rhs == pytest.approx(-0.5 * math.log(10.0), abs=1e-8)

    @pytest.mark.parametrize("name, params, t, r, R, sector, inner", [
        ("tanh_strip", {}, 0.0, 0.5, 2.0, None, 0.0),
        ("radial_stretch", {"K": 0.5}, 0.0, 0.1, 1.0, None, 0.0),
        pytest.param("shear", {}, 0.0, 0.15, 0.3, (math.pi / 3.0, 2.0 * math.pi / 3.0), 0.1,
                     marks=pytest.mark.slow),
    ])
    def test_omega_identity_gallery(self, name, params, t, r, R, sector, inner):
        """Test the omega identity at default tolerances for gallery fields."""
        field = FieldService.builtin(name, params)
        identity = QuadratureService.omega_identity(field, t, r, R, sector=sector, inner=inner)
        assert identity.difference <= max(1e-4, 10.0 * identity.error_bound)

    def test_omega_identity_inverse_stretch_sides(self):
        """Test that both sides equal log 10 when omega = 1."""
        field = FieldService.builtin("radial_stretch", {"K": 0.5})
        identity = QuadratureService.omega_identity(field, 0.0, 0.1, 1.0)
        assert identity.lhs == pytest.approx(math.log(10.0), abs=1e-8)
        assert identity.rhs == pytest.approx(math.log(10.0), abs=1e-8)


class TestCarleson:
    """Test suite for eta and the Carleson integral."""

    def test_strip_ramp_eta(self):
        """Test eta(s) = s below the strip height."""
        field = FieldService.builtin("strip_ramp")
        assert QuadratureService.carleson_eta(field, 0.5) == pytest.approx(0.5)

    def test_strip_ramp_integral(self):
        """Test the integral of eta(s)/s = 1 over [1/4, 1/2]."""
        field = FieldService.builtin("strip_ramp")
        result = QuadratureService.carleson_integral(field, 0.25, 0.5)
        assert result.value == pytest.approx(0.25, abs=1e-6)

    def test_integral_bounds(self):
        """Test that 0 < s0 < s1 is required."""
        with pytest.raises(ValidationError):
            QuadratureService.carleson_integral(FieldService.builtin("zero"), 0.5, 0.25)


class TestLimitProbe:
    """Test suite for the limit probe."""

    @pytest.fixture
    def schedule(self):
        return QuadratureService.default_schedule(1.0)

    def test_converges(self, schedule):
        """Test that r -> r converges to 0."""
        verdict = QuadratureService.limit_probe(lambda r: r, schedule)
        assert verdict.status is VerdictStatus.CONVERGES_TO
        assert verdict.value == pytest.approx(0.0, abs=1e-6)

    def test_diverges(self, schedule):
        """Test that log(1/r) diverges past a threshold of 10."""
        verdict = QuadratureService.limit_probe(lambda r: math.log(1.0 / r), schedule, diverge_threshold=10.0)
        assert verdict.status is VerdictStatus.DIVERGES
        assert verdict.slope == pytest.approx(1.0)

    def test_oscillating_is_inconclusive(self, schedule):
        """Test that sin(log log(1/r)) is inconclusive."""
        verdict = QuadratureService.limit_probe(lambda r: math.sin(math.log(math.log(1.0 / r))), schedule)
        assert verdict.status is VerdictStatus.INCONCLUSIVE

    def test_trace_order(self, schedule):
        """Test that the trace follows the schedule."""
        verdict = QuadratureService.limit_probe(lambda r: 2.0 * r, schedule)
        assert [p for p, _ in verdict.trace] == schedule
        assert verdict.trace[0][1] == pytest.approx(1.0)

    def test_short_schedule(self):
        """Test that a schedule needs four terms."""
        with pytest.raises(ValidationError):
            QuadratureService.limit_probe(lambda r: r, [0.5, 0.25, 0.125])

    def test_non_monotone_schedule(self):
        """Test that a schedule must be monotone."""
        with pytest.raises(ValidationError):
            QuadratureService.limit_probe(lambda r: r, [0.5, 0.25, 0.3, 0.1])
