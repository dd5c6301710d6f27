"""
Pytest configuration and shared fixtures for interval e-graph tests.
"""

from fractions import Fraction
from typing import Dict, List, Tuple

import pytest

from shared.models.expression import Expr, parse
from shared.models.interval import Interval, round_outward
from services.graph.egraph import EGraph
from services.orchestration.saturation import RunConfig
from services.rewrite.catalog import rule_set
from services.rewrite.rules import Rule


def make_env(bounds: Dict[str, Tuple[str, str]]) -> Dict[str, Interval]:
    return {name: round_outward(Fraction(lo), Fraction(hi)) for name, (lo, hi) in bounds.items()}


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "unit: Unit tests without saturation of large graphs"
    )
    config.addinivalue_line(
        "markers", "integration: End-to-end analyses through saturation or the CLI"
    )
    config.addinivalue_line(
        "markers", "accuracy: Worked examples whose bounds are known exactly"
    )
    config.addinivalue_line(
        "markers", "slow: Tests that take a long time to run"
    )


@pytest.fixture
def unit_env() -> Dict[str, Interval]:
    """x and y both in [1, 2]."""
    return make_env({"x": ("1", "2"), "y": ("1", "2")})


@pytest.fixture
def fast_config() -> RunConfig:
    """Limits small enough for a test suite, large enough for the worked examples."""
    return RunConfig(max_iterations=8, max_nodes=20_000, time_budget=10.0)


@pytest.fixture(scope="session")
def default_rules() -> List[Rule]:
    return rule_set()


@pytest.fixture
def ratio_graph(unit_env) -> Tuple[EGraph, int]:
    """E-graph holding y / (1 + y) with y in [1, 2]."""
    g = EGraph({"y": unit_env["y"]})
    root = g.add_expr(parse("(/ y (+ 1 y))"))
    g.rebuild()
    return g, root


@pytest.fixture
def expr_x_minus_x() -> Expr:
    return parse("(- x x)")


@pytest.fixture
def env_factory():
    """Build a domain env from exact endpoint strings, e.g. {"x": ("1/4", "3/4")}."""
    return make_env
