"""
Bound tests for the Semiannulus Regularity Toolkit.
Tests the diameter and offset bounds, the sampled complement diameter and
the randomised campaigns.
"""

import math

import pytest

from app.models.semiannulus import SemiannulusSpec
from app.middleware.run_context import run_scope
from app.services.bounds_service import BoundsService
from app.utils.errors import DegenerateCell, HypothesisViolated, UnsupportedSpec, ValidationError


def identity(z):
    return z


class TestClosedForms:
    """Test suite for the closed-form bounds."""

    @pytest.mark.parametrize("mod_S, expected", [
        (0.0, 19.241907),
        (10.0, 0.129651),
        (math.pi, 4.0),
    ])
    def test_disk_diameter_bound(self, mod_S, expected):
        """Test C exp(-mod/2) with C = 4 e^{pi/2}."""
        assert BoundsService.disk_diameter_bound(mod_S) == pytest.approx(expected, abs=1e-5)

    def test_disk_bound_negative_modulus(self):
        """Test that a negative modulus is rejected."""
        with pytest.raises(ValidationError):
            BoundsService.disk_diameter_bound(-1.0)

    def test_halfplane_offset_bound(self):
        """Test e^{pi} d e^{-mod} at mod = 2 pi, d = 1."""
        assert BoundsService.halfplane_offset_bound(2.0 * math.pi, 1.0) == pytest.approx(0.043214, abs=1e-6)

    def test_offset_bound_hypothesis(self):
        """Test that mod S <= pi violates the hypothesis."""
        with pytest.raises(HypothesisViolated):
            BoundsService.halfplane_offset_bound(math.pi, 1.0)

    def test_hyperbolic_sharp_bound(self):
        """Test 2 / cosh(mod/2) = 1 at mod = 2 arccosh 2 and its witness."""
        bound, witness = BoundsService.hyperbolic_sharp_bound(2.0 * math.acosh(2.0))
        assert bound == pytest.approx(1.0, abs=1e-12)
        assert witness.r1 * witness.r2 == pytest.approx(1.0)
        assert witness.log_ratio == pytest.approx(2.0 * math.acosh(2.0))


class TestComplementDiameter:
    """Test suite for the sampled complement diameter."""

    def test_hyperbolic_witness(self):
        """Test that the identity attains 2 / cosh 1 on T(1; e^{-1}, e)."""
        spec = SemiannulusSpec.disk(1.0, math.exp(-1.0), math.e)
        diameter = BoundsService.complement_min_diameter(identity, spec)
        assert diameter == pytest.approx(2.0 / math.cosh(1.0), abs=1e-3)
        assert diameter <= BoundsService.disk_diameter_bound(2.0)

    def test_half_plane_spec(self):
        """Test that half-plane specs are unsupported."""
        with pytest.raises(UnsupportedSpec):
            BoundsService.complement_min_diameter(identity, SemiannulusSpec.half_plane(0.0, 0.5, 1.0))


class TestCampaigns:
    """Test suite for the randomised campaigns."""

    def test_disk_fuzz(self):
        """Test that no random configuration violates the disk bound."""
        rows = BoundsService.fuzz_disk_bound(count=8, seed=7, resolution=16, samples=512)
        assert len(rows) == 8
        assert not any(row.violated for row in rows)

    def test_fuzz_is_seeded(self):
        """Test that equal seeds give equal campaigns."""
        first = BoundsService.fuzz_disk_bound(count=3, seed=11, resolution=16, samples=256)
        second = BoundsService.fuzz_disk_bound(count=3, seed=11, resolution=16, samples=256)
        assert [row.model_dump() for row in first] == [row.model_dump() for row in second]

    def test_round_subannulus(self):
        """Test log(R/r) >= mod - pi for Möbius rings."""
        rows = BoundsService.round_subannulus_campaign(count=4, seed=3)
        assert all(row.slack >= 0.0 for row in rows)
        assert all(row.sub_r < row.sub_R for row in rows)

    def test_write_fuzz_csv(self, tmp_path):
        """Test one CSV row per configuration."""
        rows = BoundsService.fuzz_disk_bound(count=2, seed=1, resolution=16, samples=256)
        path = tmp_path / "fuzz.csv"
        BoundsService.write_fuzz_csv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("zeta_arg,r1,r2")
        assert len(lines) == 3

    def test_failure_keeps_finished_rows(self, monkeypatch):
        """Test that a failing configuration stops the campaign with the earlier rows attached."""
        original = BoundsService.complement_min_diameter
        calls = []

        def failing_third(map_fn, spec, resolution=None):
            calls.append(spec)
            if len(calls) == 3:
                raise DegenerateCell("side image not finite")
            return original(map_fn, spec, resolution)

        monkeypatch.setattr(BoundsService, "complement_min_diameter", staticmethod(failing_third))
        with run_scope({"THREADS": 1}):
            with pytest.raises(DegenerateCell) as excinfo:
                BoundsService.fuzz_disk_bound(count=5, seed=2, resolution=16, samples=256)
        assert len(excinfo.value.partial) == 4
        assert len(calls) == 5

    @pytest.mark.slow
    def test_disk_fuzz_full_campaign(self):
        """Test the default campaign of 100 configurations."""
        rows = BoundsService.fuzz_disk_bound(count=100, seed=0)
        assert len(rows) == 100
        assert not any(row.violated for row in rows)

    @pytest.mark.slow
    def test_round_subannulus_full_campaign(self):
        """Test the default campaign of 20 rings."""
        rows = BoundsService.round_subannulus_campaign(count=20, seed=0)
        assert len(rows) == 20
        assert all(row.slack >= 0.0 for row in rows)
