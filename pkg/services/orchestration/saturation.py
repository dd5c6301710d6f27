"""
Equality saturation driver.

Each iteration searches every rule against the rebuilt graph, applies the
guarded matches in rule order, then rebuilds. The loop stops when an
iteration leaves the graph's version unchanged with no rule banned
(saturated) or a limit trips; the graph is always rebuilt before returning,
so class intervals are at the analysis fixpoint on exit.

Rules whose match count explodes (commutativity and associativity, mostly)
are banned for a while by a backoff scheduler: a rule that finds more than
`match_limit` matches sits out `ban_length` iterations, and both numbers
double with every further ban. The deadline is checked during search,
before every application and after each rebuild.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from shared.errors import EmptyMeet
from shared.models.operators import OpKind
from shared.models.reports import StopReason
from services.graph.egraph import ClassId, EGraph
from services.rewrite.patterns import Subst, ematch
from services.rewrite.rules import Rule, apply_rule, check_guard

logger = logging.getLogger(__name__)

Match = Tuple[Subst, ClassId]


class RunConfig(BaseModel):
    """Saturation limits and rule selection."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iterations: int = Field(30, ge=0, description="Saturation iterations; 0 runs none")
    max_nodes: int = Field(50_000, gt=0, description="Stop once the graph holds this many e-nodes")
    time_budget: float = Field(
        10.0, gt=0, description="Wall-clock seconds for one analysis, witness search included"
    )
    match_limit: int = Field(1_000, gt=0, description="Matches per rule per iteration before the rule is banned")
    ban_length: int = Field(5, gt=0, description="Iterations a rule sits out after its first ban")
    rules_path: Optional[Path] = Field(None, description="Rule manifest replacing the default catalog")


@dataclass(frozen=True)
class IterationRecord:
    """What one saturation iteration did."""
    index: int
    matches: int
    applications: int
    nodes: int
    classes: int
    repairs: int
    banned: int = 0


@dataclass
class SaturationResult:
    stop_reason: StopReason
    iterations: int = 0
    applications: int = 0
    elapsed: float = 0.0
    records: List[IterationRecord] = field(default_factory=list)


IterationCallback = Callable[[IterationRecord, EGraph], None]


@dataclass
class RuleStats:
    times_banned: int = 0
    banned_until: int = 0


class BackoffScheduler:
    """Per-rule match thresholds with exponentially growing bans."""

    def __init__(self, match_limit: int, ban_length: int):
        self.match_limit = match_limit
        self.ban_length = ban_length
        self.stats: Dict[str, RuleStats] = {}

    def search(
        self,
        rule: Rule,
        g: EGraph,
        iteration: int,
        index: Mapping[OpKind, Sequence[ClassId]],
        deadline: Optional[float] = None,
    ) -> List[Match]:
        """Matches of `rule`, or none while it is banned or when it just got banned."""
        stats = self.stats.setdefault(rule.name, RuleStats())
        if iteration < stats.banned_until:
            return []
        threshold = self.match_limit << stats.times_banned
        matches = ematch(rule.lhs, g, threshold + 1, index, deadline)
        if len(matches) > threshold:
            length = self.ban_length << stats.times_banned
            stats.times_banned += 1
            stats.banned_until = iteration + length
            logger.debug(f"Banned '{rule.name}' for {length} iteration(s) after more than {threshold} matches")
            return []
        return matches

    def banned(self, iteration: int) -> List[str]:
        return [name for name, stats in self.stats.items() if iteration < stats.banned_until]

    def lift_bans(self, iteration: int) -> None:
        for stats in self.stats.values():
            stats.banned_until = min(stats.banned_until, iteration)


def saturate(
    g: EGraph,
    rules: Sequence[Rule],
    config: RunConfig,
    on_iteration: Optional[IterationCallback] = None,
    deadline: Optional[float] = None,
) -> SaturationResult:
    """
    Run equality saturation until a fixpoint or a limit.

    `deadline` is a `time.perf_counter` value; without one the whole
    `config.time_budget` is available.
    """
    start = time.perf_counter()
    if deadline is None:
        deadline = start + config.time_budget
    g.rebuild()
    result = SaturationResult(stop_reason=StopReason.ITER_LIMIT)
    scheduler = BackoffScheduler(config.match_limit, config.ban_length)

    logger.info(
        f"Saturating with {len(rules)} rule(s): {g.node_count} nodes, {g.class_count} classes"
    )

    while True:
        if result.iterations >= config.max_iterations:
            result.stop_reason = StopReason.ITER_LIMIT
            break
        if time.perf_counter() >= deadline:
            result.stop_reason = StopReason.TIME_LIMIT
            break
        iteration = result.iterations
        version = g.version
        index = g.classes_by_op()

        stop: Optional[StopReason] = None
        found: List[Tuple[Rule, List[Match]]] = []
        for rule in rules:
            if time.perf_counter() >= deadline:
                stop = StopReason.TIME_LIMIT
                break
            found.append((rule, scheduler.search(rule, g, iteration, index, deadline)))
        match_count = sum(len(matches) for _, matches in found)

        applied = 0
        for rule, matches in found:
            if stop:
                break
            for subst, target in matches:
                if g.node_count >= config.max_nodes:
                    stop = StopReason.NODE_LIMIT
                    break
                if time.perf_counter() >= deadline:
                    stop = StopReason.TIME_LIMIT
                    break
                if check_guard(rule, subst, g) and apply_rule(rule, subst, target, g):
                    applied += 1
                    logger.debug(f"Applied '{rule.name}' at e-class {target}")

        try:
            repairs = g.rebuild()
        except EmptyMeet as exc:
            logger.error(f"❌ Soundness violation during rebuild in iteration {result.iterations + 1}: {exc}")
            raise

        result.iterations += 1
        result.applications += applied
        # rules that sat out this iteration, including any banned just now
        banned = scheduler.banned(iteration)
        record = IterationRecord(
            index=result.iterations,
            matches=match_count,
            applications=applied,
            nodes=g.node_count,
            classes=g.class_count,
            repairs=repairs,
            banned=len(banned),
        )
        result.records.append(record)
        if on_iteration is not None:
            on_iteration(record, g)

        if stop is not None:
            result.stop_reason = stop
            break
        if g.version == version:
            if not banned:
                result.stop_reason = StopReason.SATURATED
                break
            scheduler.lift_bans(iteration + 1)
        if g.node_count >= config.max_nodes:
            result.stop_reason = StopReason.NODE_LIMIT
            break
        if time.perf_counter() >= deadline:
            result.stop_reason = StopReason.TIME_LIMIT
            break

    result.elapsed = time.perf_counter() - start
    logger.info(
        f"Saturation stopped ({result.stop_reason.value}) after {result.iterations} iteration(s): "
        f"{g.node_count} nodes, {g.class_count} classes, {result.elapsed:.3f}s"
    )
    return result
