"""
Batch driver.

A job file holds one JSON object per line (JobSpec). Jobs run in a process
pool through asyncio, one e-graph per job; results are reported in input
order whatever order they finish in. A failing job is reported and the batch
carries on; the exit code is the most severe one among the jobs.
"""

import asyncio
import json
import logging
import sys
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Tuple

from pydantic import ValidationError

from shared.errors import BoundsError, EmptyMeet
from shared.models.expression import DomainEnv, Expr, parse, parse_domain, variables
from shared.models.interval import Interval
from shared.models.reports import JobSpec, Report
from services.orchestration.analyzer import Analysis, BoundsAnalyzer
from services.orchestration.saturation import RunConfig
from cli.formatting import format_report, format_summary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNSOUND = 3


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, EmptyMeet):
        return EXIT_UNSOUND
    return EXIT_INPUT


def build_env(expr: Expr, bindings: List[str]) -> Dict[str, Interval]:
    env: Dict[str, Interval] = {}
    for text in bindings:
        name, interval = parse_domain(text)
        if name in env:
            raise ValueError(f"variable '{name}' given more than once")
        env[name] = interval
    missing = [v for v in variables(expr) if v not in env]
    if missing:
        raise ValueError(f"missing domain for variable(s): {', '.join(missing)}")
    return env


def analyze_text(expr_text: str, bindings: List[str], config: RunConfig) -> Tuple[Expr, DomainEnv, Analysis]:
    """Parse, bind and analyze one expression."""
    expr = parse(expr_text)
    env = build_env(expr, bindings)
    return expr, env, BoundsAnalyzer(config).run(expr, env)


@dataclass
class JobOutcome:
    index: int
    label: str
    exit_code: int
    report_json: Optional[str] = None
    error: Optional[str] = None

    @property
    def report(self) -> Optional[Report]:
        return Report.from_json(self.report_json) if self.report_json else None


def run_job(index: int, line: str, base_config: Dict[str, Any]) -> JobOutcome:
    """Analyze one job line; never raises for job-level failures."""
    label = f"job {index + 1}"
    try:
        spec = JobSpec.model_validate_json(line)
        label = spec.name or spec.expr
        config = RunConfig.model_validate({**base_config, **spec.config})
        _, _, analysis = analyze_text(spec.expr, spec.domain_texts(), config)
    except (BoundsError, ValidationError, ValueError) as exc:
        code = exit_code_for(exc)
        logger.warning(f"⚠️ {label} failed: {exc}")
        return JobOutcome(index, label, code, error=str(exc).splitlines()[0])
    return JobOutcome(index, label, EXIT_OK, report_json=analysis.report.to_json())


async def run_jobs(lines: List[str], base_config: RunConfig, workers: int) -> List[JobOutcome]:
    """Run jobs concurrently and return outcomes in input order."""
    config = base_config.model_dump(mode="json")
    if workers <= 1 or len(lines) <= 1:
        return [run_job(i, line, config) for i, line in enumerate(lines)]

    loop = asyncio.get_running_loop()
    executor: Executor
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [loop.run_in_executor(executor, run_job, i, line, config) for i, line in enumerate(lines)]
        return list(await asyncio.gather(*futures))


def read_jobs(path: Path) -> List[str]:
    text = path.read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.strip()]


def run_batch(
    path: Path,
    config: RunConfig,
    json_output: bool = False,
    workers: int = 1,
    out: Optional[TextIO] = None,
) -> int:
    """Run every job in `path`; returns the most severe job exit code."""
    out = out or sys.stdout
    try:
        lines = read_jobs(Path(path))
    except OSError as exc:
        print(f"error: cannot read job file {path}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    outcomes = asyncio.run(run_jobs(lines, config, workers))

    for outcome in outcomes:
        if json_output:
            if outcome.report_json is not None:
                print(outcome.report_json, file=out)
            else:
                print(
                    json.dumps({"job": outcome.index + 1, "exit_code": outcome.exit_code, "error": outcome.error}),
                    file=out,
                )
            continue
        if outcome.report_json is not None:
            report = outcome.report
            assert report is not None
            print(format_report(report), file=out)
        else:
            print(f"{outcome.label}: error: {outcome.error}", file=out)
        print(file=out)

    if not json_output:
        print(format_summary([(o.label, o.report, o.error) for o in outcomes]), file=out)
    for outcome in outcomes:
        if outcome.error:
            print(f"error: {outcome.label}: {outcome.error}", file=sys.stderr)

    return max((o.exit_code for o in outcomes), default=EXIT_OK)
