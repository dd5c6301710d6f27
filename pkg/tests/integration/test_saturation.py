"""
Integration tests for the equality saturation loop and the analyze pipeline.
"""

import time
from typing import Dict, List

import pytest

from shared.errors import EvalError
from shared.models.expression import natural_extension, parse
from shared.models.interval import Interval
from shared.models.reports import StopReason
from services.graph.egraph import EGraph
from services.orchestration.analyzer import BoundsAnalyzer, analyze
from services.orchestration.saturation import BackoffScheduler, RunConfig, saturate
from tests.conftest import make_env

CORPUS = [
    ("(+ (- (sq x) (* 2 x)) 1)", {"x": ("1", "2")}),
    ("(- (* x (- 2 (* x y))) (/ 1 y))", {"x": ("1", "2"), "y": ("1", "2")}),
    ("(- (sqrt (+ x 1)) (sqrt x))", {"x": ("1", "2")}),
    ("(/ x (+ x y))", {"x": ("1", "2"), "y": ("1", "2")}),
]


def without_timing(report) -> dict:
    data = report.model_dump(mode="json", by_alias=True)
    data["stats"].pop("wall_time")
    return data


@pytest.mark.integration
class TestSaturate:
    """Test the saturation driver."""

    @pytest.mark.parametrize("text,bounds", CORPUS)
    def test_class_intervals_only_narrow(self, text, bounds, default_rules, fast_config):
        """Test no class interval widens and congruence holds after every iteration."""
        g = EGraph(make_env(bounds))
        g.add_expr(parse(text))
        g.rebuild()
        seen: Dict[int, Interval] = {c: g.data(c) for c in g.class_ids()}
        broken: List[str] = []

        def check(record, graph):
            if graph.check_congruence():
                broken.append(f"congruence after iteration {record.index}")
            for c, before in list(seen.items()):
                now = graph.data(graph.find(c))
                if not now.issubset(before):
                    broken.append(f"class {c} widened from {before} to {now}")
                seen[c] = now
            for c in graph.class_ids():
                seen.setdefault(c, graph.data(c))

        result = saturate(g, default_rules, fast_config, check)
        assert result.iterations == len(result.records)
        assert broken == []

    def test_dependency_saturates_quickly(self, expr_x_minus_x, default_rules):
        """Test x - x reaches [0,0] and a fixpoint."""
        g = EGraph({"x": Interval(0, 1)})
        root = g.add_expr(expr_x_minus_x)
        result = saturate(g, default_rules, RunConfig(max_iterations=10))
        assert g.data(root) == Interval(0, 0)
        assert result.stop_reason is StopReason.SATURATED
        assert result.iterations <= 3

    def test_zero_iterations(self, default_rules):
        """Test max_iterations=0 leaves the graph as built."""
        g = EGraph({"x": Interval(0, 1)})
        root = g.add_expr(parse("(- x x)"))
        nodes = g.node_count
        result = saturate(g, default_rules, RunConfig(max_iterations=0))
        assert result.stop_reason is StopReason.ITER_LIMIT
        assert result.iterations == 0
        assert g.node_count == nodes
        assert g.data(root) == Interval(-1, 1)

    def test_node_limit(self, unit_env, default_rules):
        """Test growth stops at the e-node limit."""
        g = EGraph(unit_env)
        g.add_expr(parse("(* (+ x y) (+ (* x y) (+ x 1)))"))
        result = saturate(g, default_rules, RunConfig(max_iterations=50, max_nodes=60))
        assert result.stop_reason is StopReason.NODE_LIMIT
        assert g.check_congruence() == []

    def test_rebuild_is_idempotent_after_saturation(self, unit_env, default_rules, fast_config):
        """Test a saturated graph needs no further repairs."""
        g = EGraph(unit_env)
        g.add_expr(parse("(/ x (+ x y))"))
        saturate(g, default_rules, fast_config)
        version = g.version
        assert g.rebuild() == 0
        assert g.version == version


@pytest.mark.integration
class TestBackoff:
    """Test banning rules whose matches explode, and the time limit."""

    def test_ban_and_doubled_threshold(self, unit_env, default_rules):
        """Test a rule over its match limit sits out, then returns with a doubled limit."""
        rule = next(r for r in default_rules if r.name == "add-comm")
        g = EGraph(unit_env)
        g.add_expr(parse("(+ (+ x y) 1)"))
        g.rebuild()
        index = g.classes_by_op()
        scheduler = BackoffScheduler(match_limit=1, ban_length=2)

        assert scheduler.search(rule, g, 0, index) == []
        assert scheduler.banned(1) == ["add-comm"]
        assert scheduler.search(rule, g, 1, index) == []
        assert scheduler.banned(2) == []
        assert len(scheduler.search(rule, g, 2, index)) == 2

    def test_bans_are_lifted_before_saturating(self, unit_env, default_rules):
        """Test a fixpoint with a banned rule is not reported as saturation."""
        rules = [r for r in default_rules if r.name == "add-comm"]
        g = EGraph(unit_env)
        g.add_expr(parse("(+ (+ x y) 1)"))
        config = RunConfig(max_iterations=20, match_limit=1, ban_length=1)
        result = saturate(g, rules, config)

        first = result.records[0]
        assert first.banned == 1
        assert first.applications == 0
        assert result.applications > 0
        assert result.stop_reason is StopReason.SATURATED
        assert result.records[-1].banned == 0

    def test_expired_deadline(self, unit_env, default_rules):
        """Test a deadline already past stops before the first iteration."""
        g = EGraph(unit_env)
        g.add_expr(parse("(/ x (+ x y))"))
        result = saturate(g, default_rules, RunConfig(), deadline=time.perf_counter())
        assert result.stop_reason is StopReason.TIME_LIMIT
        assert result.iterations == 0
        assert g.check_congruence() == []

    def test_time_budget_is_honored(self, unit_env, default_rules):
        """Test a tiny budget on a growing graph ends with TIME_LIMIT soon after it runs out."""
        g = EGraph(unit_env)
        g.add_expr(parse("(* (+ x y) (+ (* x y) (+ (* x x) (+ y 1))))"))
        config = RunConfig(max_iterations=1_000, max_nodes=1_000_000, time_budget=0.02)
        result = saturate(g, default_rules, config)
        assert result.stop_reason is StopReason.TIME_LIMIT
        assert result.elapsed < 5.0
        assert g.check_congruence() == []


@pytest.mark.integration
class TestAnalyze:
    """Test the end-to-end pipeline."""

    @pytest.mark.parametrize("text,bounds", CORPUS)
    def test_improved_inside_initial(self, text, bounds, fast_config):
        """Test the improved interval never exceeds the baseline."""
        report = analyze(parse(text), make_env(bounds), fast_config)
        assert report.improved.to_interval().issubset(report.initial.to_interval())
        assert report.rules_version == 1

    def test_deterministic(self):
        """Test two runs produce the same report apart from timing."""
        e = parse("(/ x (+ x y))")
        env = make_env({"x": ("1", "2"), "y": ("1", "2")})
        config = RunConfig(max_iterations=4, max_nodes=3000, time_budget=120.0)
        first = analyze(e, env, config)
        second = analyze(e, env, config)
        assert without_timing(first) == without_timing(second)

    def test_zero_iterations_is_baseline(self):
        """Test the report equals the natural extension without saturation."""
        e = parse("(+ (- (sq x) (* 2 x)) 1)")
        env = make_env({"x": ("1", "2")})
        report = analyze(e, env, RunConfig(max_iterations=0))
        assert report.improved == report.initial
        assert report.initial.to_interval() == natural_extension(e, env)
        assert report.width_change == 0
        assert report.stop_reason is StopReason.ITER_LIMIT

    def test_more_rules_never_worse(self, default_rules):
        """Test a superset of rules gives an interval at least as tight."""
        e = parse("(/ x (+ x y))")
        env = make_env({"x": ("1", "2"), "y": ("1", "2")})
        config = RunConfig(max_iterations=6, time_budget=60.0)
        subset = [r for r in default_rules if r.name in ("add-comm", "div-sum-to-recip")]
        small = analyze(e, env, config, rules=subset)
        extra = [r for r in default_rules if r.name in ("mul-comm", "div-to-recip")]
        large = analyze(e, env, config, rules=subset + extra)
        assert small.stop_reason is StopReason.SATURATED
        assert large.stop_reason is StopReason.SATURATED
        assert large.improved.to_interval().issubset(small.improved.to_interval())
        assert small.rules_version == 0

    def test_missing_domain(self, fast_config):
        """Test analyzing an unbound variable fails before saturation."""
        with pytest.raises(EvalError):
            BoundsAnalyzer(fast_config).run(parse("(+ x q)"), {"x": Interval(0, 1)})

    def test_rules_from_manifest(self, tmp_path):
        """Test a manifest file replaces the default catalog."""
        manifest = tmp_path / "rules.txt"
        manifest.write_text("version: 7\nsub-cancel: (- ?a ?a) => 0\n", encoding="utf-8")
        analyzer = BoundsAnalyzer(RunConfig(rules_path=manifest))
        assert [r.name for r in analyzer.rules] == ["sub-cancel"]
        report = analyzer.run(parse("(- x x)"), {"x": Interval(0, 1)}).report
        assert report.improved.to_interval() == Interval(0, 0)
