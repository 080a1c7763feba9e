"""Command-line interface: solve, check, and rate subcommands."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .driver import Termination, optimize, rate_report
from .errors import (
    ConditioningError,
    DegenerateSegmentError,
    ProblemFileError,
    SingularFreeBlockError,
    ValidationError,
)
from .objective import spec_notices
from .problem_io import (
    emit_report,
    export_trajectory,
    load_problem,
    samples_to_csv,
)
from .problems import random_problem

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amtraj",
        description="Piecewise-polynomial trajectory generation through "
        "waypoints by alternating minimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser(
        "solve", help="solve a problem file and export trajectory plus report"
    )
    solve.add_argument("problem", help="path to a JSON problem file")
    solve.add_argument(
        "--out-dir", default=".", help="directory for the output files"
    )
    solve.add_argument("--dt", type=float, default=0.02, help="sampling period")
    solve.add_argument(
        "--max-order", type=int, default=2, help="highest exported derivative"
    )
    solve.add_argument(
        "-K", "--max-iterations", type=int, default=None,
        help="override the solver iteration budget",
    )
    solve.add_argument(
        "--tolerance", type=float, default=None,
        help="override the cost-decrease stopping tolerance",
    )

    check = sub.add_parser("check", help="validate a problem file")
    check.add_argument("problem", help="path to a JSON problem file")

    rate = sub.add_parser(
        "rate", help="run convergence diagnostics on randomized instances"
    )
    rate.add_argument("--instances", type=int, default=20)
    rate.add_argument("--seed", type=int, default=0)
    rate.add_argument("--order", type=int, default=None)
    rate.add_argument("--segments", type=int, default=None)
    return parser


def _cmd_solve(args) -> int:
    try:
        spec, config = load_problem(args.problem)
    except (ProblemFileError, ValidationError) as err:
        for message in getattr(err, "errors", getattr(err, "violations", [str(err)])):
            print(f"error: {message}", file=sys.stderr)
        return EXIT_INVALID
    for notice in spec_notices(spec):
        print(f"notice: {notice}", file=sys.stderr)
    max_iterations = (
        config.max_iterations if args.max_iterations is None else args.max_iterations
    )
    tolerance = config.tolerance if args.tolerance is None else args.tolerance
    try:
        result = optimize(
            spec,
            d_free0=config.initial_guess,
            max_iterations=max_iterations,
            tolerance=tolerance,
        )
        columns, rows = export_trajectory(result, args.dt, args.max_order)
    except (DegenerateSegmentError, SingularFreeBlockError, ConditioningError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = emit_report(result)
    (out / "trajectory.csv").write_text(samples_to_csv(columns, rows))
    (out / "report.txt").write_text(report.text)
    (out / "report.csv").write_text(report.table_csv())
    print(report.text, end="")
    print(f"wrote {out / 'trajectory.csv'}, {out / 'report.txt'}, {out / 'report.csv'}")
    return EXIT_OK if result.termination is not Termination.DEGENERATE else EXIT_NUMERICAL


def _cmd_check(args) -> int:
    try:
        spec, _ = load_problem(args.problem)
    except (ProblemFileError, ValidationError) as err:
        for message in getattr(err, "errors", getattr(err, "violations", [str(err)])):
            print(f"error: {message}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    for notice in spec_notices(spec):
        print(f"notice: {notice}")
    print(
        f"ok: {spec.num_segments} segments, order {spec.order}, "
        f"rho {spec.rho}, weights {spec.weights}"
    )
    return EXIT_OK


def _cmd_rate(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0
    for i in range(args.instances):
        spec = random_problem(rng, order=args.order, num_segments=args.segments)
        try:
            result = optimize(spec)
            summary = rate_report(result.records)
        except Exception as err:  # diagnostics command: report, keep going
            print(f"instance {i}: ERROR {err}")
            failures += 1
            continue
        status = "PASS" if summary.ok else "FAIL"
        print(
            f"instance {i}: {status} "
            f"(order {spec.order}, segments {spec.num_segments}, "
            f"iterations {summary.iterations}, "
            f"rate constant {summary.rate_constant:.4g})"
        )
        if not summary.ok:
            failures += 1
            if summary.monotonicity_failures:
                print(f"  monotonicity failures: {list(summary.monotonicity_failures)}")
            if summary.decrease_failures:
                print(f"  sufficient-decrease failures: {list(summary.decrease_failures)}")
            if summary.prefix_failures:
                print(f"  prefix-bound failures: {list(summary.prefix_failures)}")
            if not summary.envelope_ok:
                print(
                    f"  envelope heuristic: peak {summary.envelope_peak:.4g} "
                    f"vs median {summary.envelope_median:.4g}"
                )
    print(f"{args.instances - failures}/{args.instances} instances passed")
    return EXIT_OK if failures == 0 else EXIT_NUMERICAL


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "check":
        return _cmd_check(args)
    return _cmd_rate(args)


if __name__ == "__main__":
    sys.exit(main())
