"""Command-line entry point: scenario runner and bundled-scenario verifier.

Exit codes: 0 all verifications passed, 1 verification failure, 2 input
error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources

from .reporting import emit_report, render_figures
from .scenario import Scenario, ScenarioError, run_scenario

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_FAILURE = 3

BUNDLED = [
    "diagonal_s3.json",
    "me_product_z3_z5.json",
    "wstar_z4_klein.json",
    "wstar_z8_family.json",
]


def _parser():
    parser = argparse.ArgumentParser(
        prog="vnelab",
        description="Run coupling/multiplier scenarios and emit verification reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("scenario", help="path to a scenario JSON file")
    _common_flags(run)

    everything = sub.add_parser("verify-all", help="run every bundled scenario")
    _common_flags(everything)
    return parser


def _common_flags(cmd):
    cmd.add_argument("--out", help="write the report to this path (default: stdout)")
    cmd.add_argument("--format", choices=["json", "csv"], default="json")
    cmd.add_argument("--seed", type=int, help="override the scenario seed")
    cmd.add_argument("--tol", type=float, help="override the verification tolerance")
    cmd.add_argument("--max-iter", type=int, help="override the SDP iteration cap")
    cmd.add_argument("--no-timestamp", action="store_true",
                     help="omit timestamps and timings for byte-stable output")
    cmd.add_argument("--figures", metavar="DIR",
                     help="also render per-task figures into DIR")


def _apply_overrides(scenario, args):
    if args.seed is not None:
        scenario.doc["seed"] = args.seed
        scenario = Scenario(scenario.doc, digest=scenario.digest, source=scenario.source)
    if args.tol is not None:
        scenario.tol = args.tol
    if args.max_iter is not None:
        scenario.max_iter = args.max_iter
    return scenario


def _execute(scenario, args):
    report = run_scenario(scenario, include_timing=not args.no_timestamp)
    text = emit_report(report, fmt=args.format, out=args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.figures:
        render_figures(report, args.figures)
    return report


def _exit_code(report):
    if report.get("solver_failure"):
        return EXIT_SOLVER_FAILURE
    if not report.get("all_passed", True):
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def bundled_scenario_path(name):
    """Filesystem path of a bundled scenario (context-managed resource)."""
    return resources.as_file(resources.files("vnelab") / "scenarios" / name)


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            scenario = Scenario.load(args.scenario)
            scenario = _apply_overrides(scenario, args)
            report = _execute(scenario, args)
            return _exit_code(report)

        # verify-all
        worst = EXIT_OK
        for name in BUNDLED:
            with bundled_scenario_path(name) as path:
                scenario = Scenario.load(path)
            scenario = _apply_overrides(scenario, args)
            saved_out = args.out
            if saved_out is not None:
                stem, dot, ext = saved_out.rpartition(".")
                args.out = f"{stem}-{name.removesuffix('.json')}{dot}{ext}" if dot else \
                    f"{saved_out}-{name.removesuffix('.json')}"
            report = _execute(scenario, args)
            args.out = saved_out
            status = "PASS" if report["all_passed"] and not report["solver_failure"] else "FAIL"
            print(f"{name}: {status}", file=sys.stderr)
            worst = max(worst, _exit_code(report))
        return worst
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
