"""
End-to-end bounds analysis.

Pipeline for one expression:
1. Baseline interval by structural induction (natural extension)
2. Build the e-graph and saturate with the rule catalog
3. Read the root class interval, met with the baseline
4. Extract lower and upper witnesses and assemble the Report

`time_budget` covers the whole pipeline: saturation may use the first
SATURATION_SHARE of it and witness refinement must stop by WITNESS_SHARE.
"""

import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from shared.errors import EmptyMeet, EvalError
from shared.models.expression import DomainEnv, Expr, natural_extension, to_sexpr, variables
from shared.models.interval import Interval
from shared.models.reports import Bounds, Report, RunStats, WitnessReport, width_change
from services.graph.egraph import ClassId, EGraph
from services.orchestration.extraction import Witness, extract_witnesses
from services.orchestration.saturation import IterationCallback, RunConfig, SaturationResult, saturate
from services.rewrite.catalog import default_manifest, rule_set
from services.rewrite.rules import Rule

logger = logging.getLogger(__name__)

SATURATION_SHARE = 0.7
WITNESS_SHARE = 0.9


@dataclass
class Analysis:
    """A finished analysis with the saturated graph kept for inspection."""
    report: Report
    graph: EGraph
    root: ClassId
    saturation: SaturationResult
    witness_lo: Witness
    witness_hi: Witness

    @property
    def improved(self) -> Interval:
        return self.report.improved.to_interval()


class BoundsAnalyzer:
    """Runs analyses with a fixed configuration and rule set."""

    def __init__(self, config: Optional[RunConfig] = None, rules: Optional[Sequence[Rule]] = None):
        self.config = config or RunConfig()
        if rules is not None:
            self.rules = list(rules)
            self.rules_version = 0
        elif self.config.rules_path is not None:
            self.rules = rule_set(self.config.rules_path)
            self.rules_version = 0
        else:
            self.rules = rule_set()
            self.rules_version = default_manifest().version

    def run(
        self,
        e: Expr,
        env: DomainEnv,
        on_iteration: Optional[IterationCallback] = None,
    ) -> Analysis:
        missing = [v for v in variables(e) if v not in env]
        if missing:
            raise EvalError(f"no domain given for variable(s) {', '.join(missing)}")
        start = time.perf_counter()
        initial = natural_extension(e, env)

        g = EGraph({v: env[v] for v in variables(e)})
        root = g.add_expr(e)
        try:
            saturation = saturate(
                g,
                self.rules,
                self.config,
                on_iteration,
                deadline=start + SATURATION_SHARE * self.config.time_budget,
            )
        except EmptyMeet as exc:
            logger.error(f"❌ Analysis of {to_sexpr(e)} aborted: {exc}")
            raise

        root = g.find(root)
        improved = g.data(root).meet(initial)
        witness_lo, witness_hi = extract_witnesses(
            g, root, deadline=start + WITNESS_SHARE * self.config.time_budget
        )
        elapsed = time.perf_counter() - start

        report = Report(
            expression=to_sexpr(e),
            domains={v: Bounds.of(env[v]) for v in variables(e)},
            initial=Bounds.of(initial),
            improved=Bounds.of(improved),
            width_change=width_change(initial, improved),
            witness_lo=_witness_report(witness_lo),
            witness_hi=_witness_report(witness_hi),
            stop_reason=saturation.stop_reason,
            rules_version=self.rules_version,
            stats=RunStats(
                iterations=saturation.iterations,
                classes=g.class_count,
                nodes=g.node_count,
                applications=saturation.applications,
                wall_time=round(elapsed, 6),
            ),
        )
        logger.info(f"✅ {report.expression}: {report.initial} -> {report.improved}")
        return Analysis(report, g, root, saturation, witness_lo, witness_hi)


def _witness_report(w: Witness) -> WitnessReport:
    return WitnessReport(expression=to_sexpr(w.expr), interval=Bounds.of(w.interval), attains=w.attains)


def analyze(
    e: Expr,
    env: DomainEnv,
    config: Optional[RunConfig] = None,
    rules: Optional[Sequence[Rule]] = None,
    on_iteration: Optional[IterationCallback] = None,
) -> Report:
    """Tighten the bounds of `e` over `env` and report the result."""
    return BoundsAnalyzer(config, rules).run(e, env, on_iteration).report
