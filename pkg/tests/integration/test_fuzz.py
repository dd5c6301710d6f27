"""
Soundness fuzzing: random expressions over random domains.

Every sampled concrete value must lie in the improved interval, the
improved interval must lie in the baseline, and the graph must be congruence
closed after every rebuild.
"""

import random
from fractions import Fraction
from typing import Dict

import pytest

from shared.errors import DomainError, EvalError
from shared.models.expression import parse, sample_range
from shared.models.interval import Interval, round_outward
from services.graph.egraph import EGraph
from services.orchestration.analyzer import BoundsAnalyzer
from services.orchestration.saturation import IterationRecord, RunConfig

FUZZ_CONFIG = RunConfig(max_iterations=4, max_nodes=2_000, time_budget=5.0)
EXPRESSIONS_PER_SEED = 25
BINARY = ("+", "-", "*", "/")
UNARY = ("neg", "recip", "sqrt", "sq")
CONSTANTS = ("0", "1", "2", "-1", "1/2", "3/4", "-3")


def random_expression(rng: random.Random, depth: int) -> str:
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.7:
            return rng.choice(("x", "y"))
        return rng.choice(CONSTANTS)
    roll = rng.random()
    if roll < 0.6:
        op = rng.choice(BINARY)
        return f"({op} {random_expression(rng, depth - 1)} {random_expression(rng, depth - 1)})"
    if roll < 0.9:
        return f"({rng.choice(UNARY)} {random_expression(rng, depth - 1)})"
    return f"(pow {random_expression(rng, depth - 1)} {rng.choice((2, 3, 4))})"


def random_domains(rng: random.Random) -> Dict[str, Interval]:
    env = {}
    for name in ("x", "y"):
        lo = Fraction(rng.randint(-12, 12), 4)
        width = Fraction(rng.randint(1, 12), 4)
        env[name] = round_outward(lo, lo + width)
    return env


def check_seed(seed: int) -> int:
    """Run one batch of random cases; returns how many were checked."""
    rng = random.Random(seed)
    analyzer = BoundsAnalyzer(FUZZ_CONFIG)
    checked = 0

    def congruence_holds(record: IterationRecord, g: EGraph) -> None:
        assert g.check_congruence() == [], f"iteration {record.index}"

    for _ in range(EXPRESSIONS_PER_SEED):
        text = random_expression(rng, rng.randint(1, 5))
        env = random_domains(rng)
        e = parse(text)
        try:
            report = analyzer.run(e, env, on_iteration=congruence_holds).report
            sampled = sample_range(e, env, 10)
        except (DomainError, EvalError):
            continue
        improved = report.improved.to_interval()
        assert improved.issubset(report.initial.to_interval()), text
        assert sampled.issubset(improved), f"{text} over {env}: sampled {sampled} escapes {improved}"
        checked += 1
    return checked


@pytest.mark.integration
@pytest.mark.parametrize("seed", [0, 1])
def test_random_expressions_are_enclosed(seed):
    """Test a small random corpus stays sound."""
    assert check_seed(seed) > 0


@pytest.mark.integration
@pytest.mark.slow
@pytest.mark.parametrize("seed", range(2, 42))
def test_random_expressions_are_enclosed_at_scale(seed):
    """Test a thousand random expressions stay sound."""
    check_seed(seed)
