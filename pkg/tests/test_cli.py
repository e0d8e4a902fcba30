"""
Command-line tests for the Semiannulus Regularity Toolkit.
Tests scenario runs, artifacts, exit codes and the gallery commands.
"""

import json
import os
import threading

import pytest

from app.middleware.run_context import run_scope
from app.models.scenario import Scenario, TaskKind
from app.services.bounds_service import BoundsService
from app.services.quadrature_service import QuadratureService
from app.utils.concurrency import map_ordered
from app.utils.errors import DegenerateCell, ToleranceNotReached, ValidationError
from config.config import get_settings
from main import app, main, run_scenario


def write_scenario(tmp_path, document, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


@pytest.fixture
def integrate_document():
    """Q ratio of the K = 2 radial stretch over two regions."""
    return {
        "task": "integrate",
        "field": {"name": "radial_stretch", "params": {"K": 2.0}},
        "params": {
            "quantity": "q_ratio",
            "max_cells": 16384,
            "regions": [{"t": 0.0, "r": 0.01, "R": 1.0}, {"t": 0.0, "r": 0.1, "R": 1.0}],
        },
    }


class TestRouter:
    """Test suite for the task router."""

    def test_every_task_is_routed(self):
        """Test that each task kind has a handler."""
        assert set(app.kinds) == set(TaskKind)


class TestScenario:
    """Test suite for scenario parsing."""

    def test_unknown_key(self):
        """Test that unknown top-level keys are rejected."""
        with pytest.raises(ValidationError):
            Scenario.parse_document({"task": "gallery", "colour": "blue"})

    def test_field_needs_one_source(self):
        """Test that a field names a builtin or a grid, not both."""
        with pytest.raises(ValidationError):
            Scenario.parse_document({"task": "dilatation", "field": {"name": "zero", "grid": "mu.csv"}})

    def test_missing_file(self, tmp_path):
        """Test that a missing file is a validation error."""
        with pytest.raises(ValidationError):
            Scenario.load(tmp_path / "absent.json")


class TestRunScope:
    """Test suite for per-run settings overrides."""

    def test_override_is_scoped(self):
        """Test that overrides apply inside the scope only."""
        with run_scope({"CAUCHY_TOL": 1e-6}):
            assert get_settings().CAUCHY_TOL == 1e-6
        assert get_settings().CAUCHY_TOL == 1e-4

    def test_unknown_setting(self):
        """Test that an unknown override is rejected."""
        with pytest.raises(ValidationError):
            with run_scope({"NO_SUCH_SETTING": 1}):
                pass

    def test_override_leaves_environment_alone(self, monkeypatch):
        """Test that overrides never write to os.environ."""
        monkeypatch.delenv("CAUCHY_TOL", raising=False)
        with run_scope({"CAUCHY_TOL": 1e-6}):
            assert "CAUCHY_TOL" not in os.environ
        assert "CAUCHY_TOL" not in os.environ

    def test_override_reaches_worker_threads(self):
        """Test that worker threads see the scoped settings."""
        with run_scope({"CAUCHY_TOL": 1e-6, "THREADS": 4}):
            seen = map_ordered(lambda _: get_settings().CAUCHY_TOL, range(8))
        assert seen == [1e-6] * 8

    def test_nested_fan_out_runs_in_the_worker(self):
        """Test that a map inside a worker stays on that worker's thread."""
        def outer(_):
            caller = threading.get_ident()
            idents = map_ordered(lambda _: threading.get_ident(), range(4), workers=4)
            return set(idents) == {caller}

        assert all(map_ordered(outer, range(4), workers=4))


class TestRunScenario:
    """Test suite for scenario execution."""

    def test_integrate_artifact(self, tmp_path, integrate_document):
        """Test the JSON artifact of a Q-ratio run."""
        out = tmp_path / "q.json"
        status = run_scenario(Scenario.parse_document(integrate_document), out=str(out))
        artifact = json.loads(out.read_text())
        assert status == 0
        assert artifact["error"] is None
        assert artifact["schema"] == 1
        assert [row["value"] for row in artifact["result"]["results"]] == pytest.approx([0.5, 0.5], abs=1e-10)
        assert artifact["config"]["scenario"]["params"]["strict"] is False

    def test_runs_are_byte_identical(self, tmp_path, integrate_document):
        """Test that two runs of one scenario write identical artifacts."""
        scenario = Scenario.parse_document(integrate_document)
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        assert run_scenario(scenario, out=str(first), threads=1) == 0
        assert run_scenario(scenario, out=str(second), threads=4) == 0
        assert first.read_bytes().replace(b'"THREADS": 1', b'"THREADS": 4') == second.read_bytes()

    def test_csv_artifact(self, tmp_path):
        """Test the CSV artifact of a dilatation run."""
        scenario = Scenario.parse_document({
            "task": "dilatation",
            "field": {"name": "constant", "params": {"re": 0.5}},
            "params": {"points": [[0.0, 1.0], [1.0, 1.0]]},
            "output": {"format": "csv"},
        })
        out = tmp_path / "d.csv"
        assert run_scenario(scenario, out=str(out)) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# {")
        assert lines[1].startswith("x,y,z0_re,z0_im,mu_re,mu_im,K,D,D_neg,clipped")
        assert float(lines[2].split(",")[7]) == pytest.approx(3.0)
        assert len(lines) == 4

    def test_numerical_failure_exit_code(self, tmp_path):
        """Test exit code 3 and a partial artifact when strict quadrature fails."""
        scenario = Scenario.parse_document({
            "task": "integrate",
            "field": {"name": "shear"},
            "params": {"kernel": "DPlusMinusOne", "strict": True, "max_cells": 64,
                       "regions": [{"t": 0.0, "r": 0.01, "R": 0.3}]},
        })
        out = tmp_path / "fail.json"
        assert run_scenario(scenario, out=str(out)) == 3
        artifact = json.loads(out.read_text())
        assert artifact["error"]["type"] == "ToleranceNotReached"
        assert artifact["error"]["exit_code"] == 3

    def test_invalid_params_exit_code(self, tmp_path):
        """Test exit code 2 for parameters the task does not know."""
        scenario = Scenario.parse_document({"task": "gallery", "params": {"name": "shear", "colour": 1}})
        out = tmp_path / "bad.json"
        assert run_scenario(scenario, out=str(out)) == 2
        assert json.loads(out.read_text())["error"]["category"] == "validation"

    def test_missing_field_exit_code(self, tmp_path):
        """Test exit code 2 when a task needs a field."""
        scenario = Scenario.parse_document({"task": "sweep", "params": {}})
        assert run_scenario(scenario, out=str(tmp_path / "s.json")) == 2

    def test_certify_scenario(self, tmp_path):
        """Test a point certificate through the command line path."""
        scenario = Scenario.parse_document({
            "task": "certify",
            "field": {"name": "zero"},
            "params": {"mode": "point", "t": 0.0, "levels": 6, "max_cells": 4096},
        })
        out = tmp_path / "c.json"
        assert run_scenario(scenario, out=str(out)) == 0
        certificate = json.loads(out.read_text())["result"]["certificate"]
        assert certificate["conclusion"] == "Differentiable"
        assert [v["name"] for v in certificate["verdicts"]] == ["Cond1", "Cond2", "BrakalovaJenkins"]

    def test_sweep_rows(self, tmp_path):
        """Test one sweep row per (t, r) pair."""
        scenario = Scenario.parse_document({
            "task": "sweep",
            "field": {"name": "radial_stretch", "params": {"K": 2.0}},
            "params": {"quantity": "holder_mean", "t_values": [0.0], "levels": 4, "max_cells": 4096},
        })
        out = tmp_path / "sweep.json"
        assert run_scenario(scenario, out=str(out)) == 0
        rows = json.loads(out.read_text())["result"]["rows"]
        assert [row["r"] for row in rows] == [0.5, 0.25, 0.125, 0.0625]
        assert all(row["value"] == pytest.approx(-0.5, abs=1e-10) for row in rows)


DETERMINISM_SCENARIOS = {
    "dilatation": {
        "task": "dilatation",
        "field": {"name": "radial_stretch", "params": {"K": 2.0}},
        "params": {"points": [[0.5, 0.5], [1.0, 2.0]], "spherical_diameter": True},
    },
    "integrate": {
        "task": "integrate",
        "field": {"name": "shear"},
        "params": {"quantity": "holder_mean", "max_cells": 4096, "regions": [{"t": 0.0, "r": 0.2, "R": 1.0}]},
    },
    "modulus": {
        "task": "modulus",
        "params": {"region": {"kind": "disk", "zeta": [1.0, 0.0], "r": 0.2, "R": 0.8}, "n": 16, "m": 16,
                   "map": "radial_stretch", "map_params": {"K": 2.0}},
    },
    "bounds-fuzz": {
        "task": "bounds-fuzz",
        "seed": 3,
        "params": {"campaign": "disk", "count": 3, "resolution": 16, "samples": 256},
    },
    "certify": {
        "task": "certify",
        "field": {"name": "radial_stretch", "params": {"K": 2.0}},
        "params": {"mode": "point", "levels": 5, "max_cells": 4096},
    },
    "gallery": {
        "task": "gallery",
        "params": {"name": "tanh_strip", "points": [[0.3, 0.5], [0.3, 2.0]]},
    },
    "sweep": {
        "task": "sweep",
        "field": {"name": "bump", "params": {"center_im": 0.3, "radius": 0.25, "amplitude": 0.4}},
        "params": {"quantity": "q_ratio", "t_values": [0.0, 0.5], "levels": 3, "max_cells": 4096},
    },
}


class TestDeterminism:
    """Test suite for byte-identical artifacts."""

    def test_every_task_has_a_scenario(self):
        """Test that every task kind is covered below."""
        assert set(DETERMINISM_SCENARIOS) == {kind.value for kind in TaskKind}

    @pytest.mark.parametrize("task", sorted(DETERMINISM_SCENARIOS))
    def test_repeated_runs_are_byte_identical(self, tmp_path, task):
        """Test that repeated runs with a fixed seed write the same bytes."""
        scenario = Scenario.parse_document(DETERMINISM_SCENARIOS[task])
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        assert run_scenario(scenario, out=str(first), threads=2) == 0
        assert run_scenario(scenario, out=str(second), threads=2) == 0
        assert first.read_bytes() == second.read_bytes()


class TestPartialArtifacts:
    """Test suite for artifacts of runs that fail part way."""

    def test_sweep_keeps_finished_rows(self, tmp_path, monkeypatch):
        """Test that rows of the pairs evaluated before a failure reach the artifact."""
        original = QuadratureService.holder_mean

        def failing_far_out(mu, t, r, sector=None, inner=0.0, options=None):
            if t > 5.0:
                raise ToleranceNotReached(f"cell cap reached at t = {t}")
            return original(mu, t, r, sector, inner, options)

        monkeypatch.setattr(QuadratureService, "holder_mean", staticmethod(failing_far_out))
        scenario = Scenario.parse_document({
            "task": "sweep",
            "field": {"name": "radial_stretch", "params": {"K": 2.0}},
            "params": {"quantity": "holder_mean", "t_values": [0.0, 10.0], "levels": 3, "max_cells": 4096},
        })
        out = tmp_path / "sweep.json"
        assert run_scenario(scenario, out=str(out)) == 3
        artifact = json.loads(out.read_text())
        assert artifact["error"]["type"] == "ToleranceNotReached"
        assert [(row["t"], row["r"]) for row in artifact["result"]["rows"]] == [(0.0, 0.5), (0.0, 0.25),
                                                                                (0.0, 0.125)]

    def test_campaign_keeps_finished_rows(self, tmp_path, monkeypatch):
        """Test that a failing campaign configuration leaves the others in the artifact."""
        original = BoundsService.complement_min_diameter
        calls = []

        def failing_second(map_fn, spec, resolution=None):
            calls.append(spec)
            if len(calls) == 2:
                raise DegenerateCell("side image not finite")
            return original(map_fn, spec, resolution)

        monkeypatch.setattr(BoundsService, "complement_min_diameter", staticmethod(failing_second))
        scenario = Scenario.parse_document({
            "task": "bounds-fuzz",
            "params": {"campaign": "disk", "count": 3, "resolution": 16, "samples": 256},
        })
        out = tmp_path / "fuzz.json"
        assert run_scenario(scenario, out=str(out), threads=1) == 3
        artifact = json.loads(out.read_text())
        assert artifact["error"]["type"] == "DegenerateCell"
        assert len(artifact["result"]["rows"]) == 2
        assert artifact["result"]["campaign"] == "disk"


class TestMain:
    """Test suite for the argument parser entry point."""

    def test_scenario_file(self, tmp_path, integrate_document):
        """Test a run from a scenario file with an --out override."""
        path = write_scenario(tmp_path, integrate_document)
        out = tmp_path / "artifact.json"
        assert main(["--scenario", path, "--out", str(out), "--seed", "5"]) == 0
        assert json.loads(out.read_text())["config"]["settings"]["SEED"] == 5

    def test_tol_flag(self, tmp_path, integrate_document):
        """Test that --tol sets the Cauchy tolerance of the run."""
        path = write_scenario(tmp_path, integrate_document)
        out = tmp_path / "artifact.json"
        assert main(["--scenario", path, "--out", str(out), "--tol", "1e-6"]) == 0
        assert json.loads(out.read_text())["config"]["settings"]["CAUCHY_TOL"] == 1e-6

    def test_invalid_json(self, tmp_path):
        """Test exit code 2 for a file that is not JSON."""
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert main(["--scenario", str(path)]) == 2

    def test_gallery_list(self, capsys):
        """Test the gallery listing."""
        assert main(["gallery", "list"]) == 0
        listing = json.loads(capsys.readouterr().out)
        assert "shear" in listing

    def test_gallery_eval(self, capsys):
        """Test evaluation of a gallery map at a point."""
        assert main(["gallery", "eval", "radial_stretch", "--param", "K=2", "--point", "1", "1"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert rows[0]["mu_im"] == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert rows[0]["error"] < 1e-6

    def test_gallery_eval_unknown(self):
        """Test exit code 2 for an unknown map."""
        assert main(["gallery", "eval", "spiral", "--point", "0", "1"]) == 2
