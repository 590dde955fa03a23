#!/usr/bin/env python3
"""
Witness toolkit command line.

Evaluates intensity-moment nonclassicality witnesses of Gaussian states from
SHG and twin-beam sources: single scenarios, grid sweeps, zero contours,
figure-preset datasets and the oracle self-test.

Exit codes: 0 ok, 2 configuration error, 3 numeric error, 4 no sign change.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from modules.core.config_manager import ConfigManager
from modules.core.errors import ConfigurationError, WitnessToolError
from modules.core.pipeline import WitnessPipeline
from modules.exporter import DatasetExporter
from modules.scenario_handler import ScenarioHandler

logger = logging.getLogger(__name__)


def parse_bracket(text: str) -> Tuple[float, float]:
    """'lo,hi' -> (lo, hi)"""
    try:
        lo, hi = (float(part) for part in text.split(","))
    except ValueError as e:
        raise ConfigurationError(f"Bracket must look like 'lo,hi', got {text!r}", key="bracket") from e
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ConfigurationError(f"Bracket needs finite lo < hi, got {text!r}", key="bracket")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, help="Jet truncation order (default from config)")
    common.add_argument("--seed", type=int, help="Seed for the Monte Carlo check")
    common.add_argument("--jobs", type=int, help="Parallel sweep workers")
    common.add_argument("--tolerance", type=float, help="Bisection / self-test tolerance override")
    common.add_argument("--config-dir", help="Alternative configuration directory")
    common.add_argument("--output-dir", help="Directory for default output files")
    common.add_argument("-v", "--verbose", action="store_true", help="Verbose logging")

    parser = argparse.ArgumentParser(description="Intensity-moment nonclassicality witnesses of Gaussian states")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Evaluate one scenario file")
    run.add_argument("file")

    sweep = commands.add_parser("sweep", parents=[common], help="Evaluate the sweep axes of a scenario file")
    sweep.add_argument("file")
    sweep.add_argument("--out", help="Output .csv or .xlsx")

    contour = commands.add_parser("contour", parents=[common], help="Locate a sign change by bisection")
    contour.add_argument("file")
    contour.add_argument("--axis", required=True, help="Free parameter (e.g. b_sq, b_s, xi1_mag2)")
    contour.add_argument("--bracket", required=True, help="lo,hi")
    contour.add_argument("--witness", help="Witness to follow (default: first in the file)")

    phase = commands.add_parser("phase", parents=[common], help="Optimal stimulating phase of xi1")
    phase.add_argument("file")
    phase.add_argument("--witness", help="Witness to minimize (default: first in the file)")

    figure = commands.add_parser("figure", parents=[common], help="Write a figure-preset dataset")
    figure.add_argument("preset", help="fig1 .. fig9")
    figure.add_argument("--out", help="Output .csv or .xlsx")

    selftest = commands.add_parser("selftest", parents=[common], help="Run the oracle-equivalence suite")
    selftest.add_argument("--states", type=int, help="Number of randomized states")

    echo = commands.add_parser("echo", parents=[common], help="Print the normalized scenario file")
    echo.add_argument("file")
    return parser


def execute(args: argparse.Namespace) -> int:
    if args.config_dir:
        ConfigManager.reload_configs()
    pipeline = WitnessPipeline(
        output_dir=args.output_dir,
        config_dir=args.config_dir,
        order=args.order,
        jobs=args.jobs,
        tolerance=args.tolerance,
        seed=args.seed,
    )
    handler = ScenarioHandler()
    exporter = DatasetExporter(args.config_dir)

    if args.command == "selftest":
        summary = pipeline.selftest(args.states)
        for check in summary["checks"]:
            print(f"[{'PASS' if check['passed'] else 'FAIL'}] {check['name']}: {check['detail']}")
        return 0 if summary["passed"] else 3

    if args.command == "figure":
        result = pipeline.figure_dataset(args.preset)
        if args.out:
            out = args.out
        else:
            naming = pipeline.engine_config["output"]["file_naming"]["figure"]
            out = str(pipeline.output_dir / naming.format(preset=args.preset))
        path = exporter.write(result, out)
        print(f"{args.preset}: {len(result)} rows -> {path}")
        return 0

    scenario, axes = handler.load(args.file)

    if args.command == "echo":
        print(handler.echo(scenario, axes))
    elif args.command == "run":
        print(exporter.format_report(pipeline.run_scenario(scenario)))
    elif args.command == "sweep":
        if not axes:
            raise ConfigurationError(f"Scenario file {args.file} has no 'sweep' axes", key="sweep")
        result = pipeline.sweep(scenario, axes)
        if args.out:
            out = args.out
        else:
            naming = pipeline.engine_config["output"]["file_naming"]["sweep"]
            out = str(pipeline.output_dir / naming.format(stem=Path(args.file).stem))
        path = exporter.write(result, out)
        print(f"{len(result)} rows -> {path}")
    elif args.command == "contour":
        root = pipeline.contour(scenario, args.axis, parse_bracket(args.bracket), args.witness)
        print(f"{args.axis} = {exporter.format_number(root)}")
    elif args.command == "phase":
        phase = pipeline.optimal_phase(scenario, args.witness)
        print(f"phi1 = {exporter.format_number(phase)} rad = {exporter.format_number(phase / math.pi)} pi (mod pi)")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Command line entry point; returns the process exit code"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return execute(args)
    except WitnessToolError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
