#!/usr/bin/env python3
"""
Command-line front end for the interval bounds analyzer.

Exit codes: 0 success, 2 input error, 3 soundness abort.

Examples:
    interval-egraph --expr "(+ (- (sq x) (* 2 x)) 1)" --var x=1:2
    interval-egraph --expr "(/ y (+ 1 y))" --var y=1:2 --json
    interval-egraph --input jobs.jsonl --workers 4
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from shared.errors import BoundsError
from shared.models.expression import sample_range
from services.graph.dot import to_dot
from cli.batch import EXIT_INPUT, EXIT_OK, EXIT_UNSOUND, analyze_text, exit_code_for, run_batch
from cli.config import configure_logging, settings, validate_and_log_config
from cli.formatting import format_report

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interval-egraph",
        description="Tighten interval bounds of real expressions with equality saturation",
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--expr", metavar="S", help="Expression in s-expression syntax")
    source.add_argument("--input", metavar="FILE", type=Path, help="Batch job file (one JSON job per line)")
    parser.add_argument(
        "--var", metavar="NAME=LO:HI", action="append", default=[],
        help="Variable domain, repeatable; endpoints may be rationals such as 1/4",
    )
    parser.add_argument("--rules", metavar="FILE", type=Path, help="Rule manifest replacing the default catalog")
    parser.add_argument("--max-iters", metavar="N", type=int, help="Saturation iteration limit")
    parser.add_argument("--max-nodes", metavar="N", type=int, help="E-node limit")
    parser.add_argument("--timeout", metavar="SECS", type=float, help="Time budget per analysis in seconds")
    parser.add_argument("--match-limit", metavar="N", type=int, help="Matches per rule per iteration before a ban")
    parser.add_argument("--ban-length", metavar="N", type=int, help="Iterations a banned rule sits out at first")
    parser.add_argument("--workers", metavar="N", type=int, help="Parallel batch workers")
    parser.add_argument("--json", action="store_true", help="Emit JSON reports")
    parser.add_argument("--dump-dot", metavar="FILE", type=Path, help="Write the saturated e-graph as DOT")
    parser.add_argument("--check", action="store_true", help="Verify the result against a sampling oracle")
    parser.add_argument("--log-level", metavar="LEVEL", help="Logging level (default from LOG_LEVEL)")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK

    configure_logging(args.log_level)
    validation = validate_and_log_config()
    if not validation["valid"]:
        for error in validation["errors"]:
            print(f"error: {error}", file=sys.stderr)
        return EXIT_INPUT

    try:
        config = settings.run_config(
            max_iterations=args.max_iters,
            max_nodes=args.max_nodes,
            time_budget=args.timeout,
            match_limit=args.match_limit,
            ban_length=args.ban_length,
            rules_path=args.rules,
        )
    except ValidationError as exc:
        print(f"error: invalid limits: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.input is not None:
        workers = args.workers if args.workers is not None else settings.BOUNDS_BATCH_WORKERS
        return run_batch(args.input, config, json_output=args.json, workers=workers)

    if not args.expr:
        parser.print_usage(sys.stderr)
        print("error: one of --expr or --input is required", file=sys.stderr)
        return EXIT_INPUT

    try:
        expr, env, analysis = analyze_text(args.expr, args.var, config)
    except (BoundsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)

    report = analysis.report
    sampled = None
    if args.check:
        try:
            oracle = sample_range(expr, env, settings.BOUNDS_SAMPLE_POINTS)
        except BoundsError as exc:
            print(f"error: sampling oracle failed: {exc}", file=sys.stderr)
            return EXIT_INPUT
        sampled = str(oracle)
        if not oracle.issubset(analysis.improved):
            logger.error(f"❌ Sampled range {oracle} escapes improved interval {report.improved}")
            print(f"error: sampled range {oracle} is not inside {report.improved}", file=sys.stderr)
            return EXIT_UNSOUND

    if args.dump_dot is not None:
        try:
            args.dump_dot.write_text(to_dot(analysis.graph), encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.dump_dot}: {exc}", file=sys.stderr)
            return EXIT_INPUT

    if args.json:
        print(report.to_json())
    else:
        print(format_report(report, sampled))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
