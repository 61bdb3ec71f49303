"""Command line for running scheduling experiments.

Exit status: 0 on success, 2 on usage errors, 3 when any result row hit the
repetition cap before reaching the confidence-interval target.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .experiment import (
    ExperimentPlan,
    SWEEP_AXES,
    run_plan,
    sweep,
    write_summary_csv,
)
from .policies import POLICIES
from .workload import (
    InvalidParameter,
    ParetoSizes,
    TraceError,
    WeibullSizes,
    ingest_trace,
    scale_to_load,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sizesched",
        description="Simulate size-based scheduling policies under noisy job-size "
                    "estimates and report mean sojourn times with confidence "
                    "intervals. Results are CSV; see --out.",
    )
    parser.add_argument(
        "--policy", action="append", metavar="NAME",
        help=f"policy to run; repeat for paired comparisons "
             f"(choices: {', '.join(POLICIES)}; default: fspe+ps)",
    )
    parser.add_argument("--njobs", type=int, default=10000,
                        help="jobs per repetition (default 10000)")
    parser.add_argument("--size-dist", choices=("weibull", "pareto"),
                        default="weibull", help="job size family (default weibull)")
    parser.add_argument("--shape", type=float, default=0.25,
                        help="Weibull size shape (default 0.25)")
    parser.add_argument("--alpha", type=float,
                        help="Pareto size tail index; required with --size-dist pareto")
    parser.add_argument("--timeshape", type=float, default=1.0,
                        help="Weibull shape of inter-arrival gaps (default 1.0)")
    parser.add_argument("--load", type=float, default=0.9,
                        help="offered load (default 0.9)")
    parser.add_argument("--sigma", type=float, default=0.5,
                        help="log-normal size-estimate error (default 0.5)")
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed; repetition r uses seed+r (default 0)")
    parser.add_argument("--reps-min", type=int, default=30)
    parser.add_argument("--reps-max", type=int, default=5000)
    parser.add_argument("--ci-target", type=float, default=0.05,
                        help="stop once ci95 halfwidth <= target*mean (default 0.05)")
    parser.add_argument("--sweep", choices=SWEEP_AXES, metavar="AXIS",
                        help=f"parameter to sweep ({', '.join(SWEEP_AXES)})")
    parser.add_argument("--values", metavar="V1,V2,...",
                        help="comma-separated values for --sweep")
    parser.add_argument("--trace", metavar="PATH",
                        help="replay a trace file instead of synthetic workloads")
    parser.add_argument("--trace-format", choices=("two_column", "swim_tsv"),
                        default="two_column")
    parser.add_argument("--target-load", type=float,
                        help="rescale trace sizes to this offered load")
    parser.add_argument("--out", metavar="DIR",
                        help="write summary.csv (and per-job files) here "
                             "instead of stdout")
    parser.add_argument("--per-job", action="store_true",
                        help="also write one completion-record CSV per "
                             "(policy, repetition); requires --out")
    parser.add_argument("--backend", choices=("auto", "compiled", "python"),
                        default="auto", help="event-loop implementation")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    return parser


def _parse_values(axis: str, text: str, parser: argparse.ArgumentParser) -> list:
    values = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            values.append(int(chunk) if axis == "njobs" else float(chunk))
        except ValueError:
            parser.error(f"bad value {chunk!r} for --values")
    if not values:
        parser.error("--values is empty")
    return values


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    policies = tuple(args.policy) if args.policy else ("fspe+ps",)
    if args.njobs < 1:
        parser.error("--njobs must be >= 1")
    if args.per_job and not args.out:
        parser.error("--per-job requires --out")
    if (args.sweep is None) != (args.values is None):
        parser.error("--sweep and --values must be given together")
    if args.size_dist == "pareto" and args.alpha is None:
        parser.error("--size-dist pareto requires --alpha")
    if args.size_dist == "weibull" and args.alpha is not None:
        parser.error("--alpha only applies with --size-dist pareto")
    if args.target_load is not None and not args.trace:
        parser.error("--target-load requires --trace")

    trace = None
    if args.trace:
        try:
            trace = ingest_trace(args.trace, format=args.trace_format)
            if args.target_load is not None:
                trace = scale_to_load(trace, args.target_load)
        except (TraceError, InvalidParameter, OSError) as exc:
            parser.error(str(exc))

    if args.size_dist == "pareto":
        size_dist = ParetoSizes(args.alpha)
    else:
        size_dist = WeibullSizes(args.shape)

    try:
        plan = ExperimentPlan(
            policies=policies, njobs=args.njobs, size_dist=size_dist,
            timeshape=args.timeshape, load=args.load, sigma=args.sigma,
            reps_min=args.reps_min, ci_target=args.ci_target,
            reps_max=args.reps_max, base_seed=args.seed, trace=trace,
            backend=args.backend,
        )
    except (ValueError, InvalidParameter) as exc:
        parser.error(str(exc))

    per_job_dir = os.path.join(args.out, "jobs") if args.per_job else None
    try:
        if args.sweep:
            values = _parse_values(args.sweep, args.values, parser)
            rows = sweep(plan, args.sweep, values, per_job_dir=per_job_dir)
        else:
            rows = run_plan(plan, per_job_dir=per_job_dir)
    except ValueError as exc:
        parser.error(str(exc))

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        summary_path = os.path.join(args.out, "summary.csv")
        with open(summary_path, "w", encoding="utf-8") as fh:
            write_summary_csv(rows, fh)
        print(summary_path)
    else:
        write_summary_csv(rows, sys.stdout)

    stragglers = [row for row in rows if not row.converged]
    if stragglers:
        print(
            f"warning: {len(stragglers)} result row(s) did not converge "
            f"within --reps-max repetitions",
            file=sys.stderr,
        )
        return EXIT_NOT_CONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
