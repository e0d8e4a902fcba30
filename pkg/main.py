"""
Main entry point for the Semiannulus Regularity Toolkit.
Builds the task router and runs scenario files from the command line.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from app.middleware.error_handler import EXIT_OK, error_document, guarded
from app.middleware.run_context import run_scope
from app.models.field import Domain
from app.models.scenario import OutputFormat, Scenario
from app.routes import bounds, certify, dilatation, gallery, integrate, modulus, sweep
from app.routes.router import TaskRouter
from app.services.artifact_service import ArtifactService, to_plain
from app.services.gallery_service import GalleryService
from config.config import get_settings

logger = logging.getLogger(__name__)

# Create the task router and include every task module
app = TaskRouter()
for module in (dilatation, integrate, modulus, bounds, certify, gallery, sweep):
    app.include_router(module.router)


def _overrides(scenario: Scenario, threads: Optional[int], seed: Optional[int],
               tol: Optional[float]) -> Dict[str, Any]:
    """Settings overrides of a run; command-line flags win over the scenario file."""
    overrides = dict(scenario.settings)
    if scenario.seed is not None:
        overrides["SEED"] = scenario.seed
    if scenario.threads is not None:
        overrides["THREADS"] = scenario.threads
    if threads is not None:
        overrides["THREADS"] = threads
    if seed is not None:
        overrides["SEED"] = seed
    if tol is not None:
        overrides["CAUCHY_TOL"] = tol
    return overrides


def _execute(scenario: Scenario, overrides: Dict[str, Any], fmt: OutputFormat, path: Optional[str]) -> int:
    with run_scope(overrides) as context:
        settings = get_settings()
        config = {"scenario": scenario.model_dump(mode="json"), "settings": settings.model_dump()}
        header = {"tool": settings.APP_NAME, "version": settings.VERSION, "config": config}

        status, params = guarded(lambda: app.resolve_params(scenario))
        outcome = params
        if status == EXIT_OK:
            config["scenario"]["params"] = params.model_dump(mode="json")
            status, outcome = guarded(lambda: app.dispatch(scenario, params, context))

        if status == EXIT_OK:
            for message in outcome.warnings:
                context.warn(message)
            text = ArtifactService.render(fmt, header, outcome.document, outcome.rows,
                                          context.collected_warnings())
        else:
            text = ArtifactService.render(fmt, header, context.partial_document, context.partial_rows,
                                          context.collected_warnings(), error_document(outcome))
        ArtifactService.write(text, path)
    return status


def run_scenario(scenario: Scenario, out: Optional[str] = None, fmt: Optional[OutputFormat] = None,
                 threads: Optional[int] = None, seed: Optional[int] = None,
                 tol: Optional[float] = None) -> int:
    """
    Run one scenario and write its artifact.

    Args:
        scenario: Validated scenario
        out: Artifact path (defaults to the scenario's output path, then stdout)
        fmt: Artifact format (defaults to the scenario's output format)
        threads: Worker threads
        seed: Random seed
        tol: Cauchy tolerance of limit probes

    Returns:
        int: 0 on success, 2 on validation errors, 3 on numerical failures
    """
    fmt = fmt or scenario.output.format
    path = out if out is not None else scenario.output.path
    overrides = _overrides(scenario, threads, seed, tol)
    status, result = guarded(lambda: _execute(scenario, overrides, fmt, path))
    return result if status == EXIT_OK else status


def _parse_params(pairs: List[str]) -> Dict[str, float]:
    params = {}
    for pair in pairs:
        key, _, value = pair.partition("=")
        params[key] = float(value)
    return params


def _gallery_command(args: argparse.Namespace) -> int:
    if args.gallery_command == "list":
        print(json.dumps(GalleryService.listing(), indent=2, sort_keys=True))
        return EXIT_OK
    points = [complex(x, y) for x, y in args.point]
    domain = Domain(args.domain) if args.domain else None
    status, rows = guarded(lambda: gallery.evaluate_map(args.name, _parse_params(args.param), domain,
                                                        points, args.h))
    if status == EXIT_OK:
        print(json.dumps(to_plain(rows), indent=2, sort_keys=True, allow_nan=False))
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiannulus",
        description="Certify boundary regularity of mu-conformal maps from scenario files.",
    )
    parser.add_argument("--scenario", help="scenario JSON file")
    parser.add_argument("--out", help="artifact path (default: scenario output path, then stdout)")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], help="artifact format")
    parser.add_argument("--threads", type=int, help="worker threads (0 = all cores)")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--tol", type=float, help="Cauchy tolerance of limit probes")
    parser.add_argument("--version", action="version", version=get_settings().VERSION)

    commands = parser.add_subparsers(dest="command")
    gallery_parser = commands.add_parser("gallery", help="inspect the gallery maps")
    gallery_commands = gallery_parser.add_subparsers(dest="gallery_command", required=True)
    gallery_commands.add_parser("list", help="list maps and their parameters")
    evaluate = gallery_commands.add_parser("eval", help="evaluate a map and its Beltrami coefficient")
    evaluate.add_argument("name")
    evaluate.add_argument("--point", nargs=2, type=float, action="append", default=[], metavar=("X", "Y"))
    evaluate.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    evaluate.add_argument("--domain", choices=[d.value for d in Domain])
    evaluate.add_argument("--h", type=float, default=1e-5)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=get_settings().LOG_LEVEL, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gallery":
        return _gallery_command(args)
    if not args.scenario:
        parser.error("--scenario is required")

    status, scenario = guarded(lambda: Scenario.load(args.scenario))
    if status != EXIT_OK:
        return status
    fmt = OutputFormat(args.format) if args.format else None
    return run_scenario(scenario, args.out, fmt, args.threads, args.seed, args.tol)


if __name__ == "__main__":
    sys.exit(main())
