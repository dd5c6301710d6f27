"""
Unit tests for witness extraction.
"""

from fractions import Fraction

import pytest

from shared.models.expression import Expr, parse, to_sexpr
from shared.models.interval import Interval
from shared.models.reports import WitnessSide
from services.graph.egraph import EGraph
from services.orchestration.extraction import (
    FRONT_LIMIT,
    WitnessExtractor,
    extract_witness,
    extract_witnesses,
)
from services.orchestration.saturation import RunConfig, saturate


@pytest.mark.unit
class TestWitness:
    """Test picking represented terms that reach the class bounds."""

    def test_singleton_class(self, unit_env):
        """Test a variable class is its own witness."""
        g = EGraph(unit_env)
        x = g.add_expr(parse("x"))
        lo, hi = extract_witnesses(g, x)
        assert lo.expr == Expr.var("x")
        assert hi.expr == Expr.var("x")
        assert lo.attains and hi.attains
        assert lo.interval == Interval(1, 2)

    def test_constant_beats_dependency_form(self):
        """Test the class {x - x, 0} is witnessed by 0 on both sides."""
        g = EGraph({"x": Interval(0, 1)})
        diff = g.add_expr(parse("(- x x)"))
        g.union(diff, g.add_expr(parse("0")))
        g.rebuild()
        for side in WitnessSide:
            w = extract_witness(g, diff, side)
            assert w.expr == Expr.const(Fraction(0))
            assert w.interval == Interval(0, 0)
            assert w.attains

    def test_rewritten_ratio(self, ratio_graph):
        """Test the reciprocal form witnesses both bounds of y/(1+y)."""
        g, root = ratio_graph
        g.union(root, g.add_expr(parse("(recip (+ 1 (/ 1 y)))")))
        g.rebuild()
        lo, hi = extract_witnesses(g, root)
        assert to_sexpr(lo.expr) == "(recip (+ 1 (/ 1 y)))"
        assert lo.attains and hi.attains
        assert lo.interval == g.data(root)

    def test_bound_reached_only_by_the_meet(self):
        """Test a bound no member reaches falls back to the smallest term."""
        g = EGraph({"x": Interval(-1, 2), "y": Interval(-2, 1)})
        sq = g.add_expr(parse("(sq x)"))
        g.add_expr(parse("(sq y)"))
        # x and y are merged directly so the class interval is narrower than either member
        g.union(g.add_expr(parse("x")), g.add_expr(parse("y")))
        g.rebuild()
        assert g.data(sq) == Interval(0, 1)

        lo, hi = extract_witnesses(g, sq)
        assert lo.attains
        assert not hi.attains
        assert to_sexpr(hi.expr) == "(sq x)"
        assert hi.interval == Interval(0, 4)

    def test_fronts_are_bounded(self, ratio_graph):
        """Test every class keeps at most FRONT_LIMIT candidates."""
        g, root = ratio_graph
        g.union(root, g.add_expr(parse("(recip (+ 1 (/ 1 y)))")))
        g.rebuild()
        extractor = WitnessExtractor(g)
        extractor.run(root)
        assert extractor.fronts
        assert all(0 < len(front) <= FRONT_LIMIT for front in extractor.fronts.values())

    def test_deterministic(self, ratio_graph):
        """Test two extractions pick the same terms."""
        g, root = ratio_graph
        first = extract_witnesses(g, root)
        second = extract_witnesses(g, root)
        assert first == second


@pytest.mark.unit
class TestCyclicGraphs:
    """Test extraction from graphs whose classes reach themselves."""

    def test_self_loop(self):
        """Test the class {x, x * 1} is witnessed by x."""
        g = EGraph({"x": Interval(0, 1)})
        x = g.add_expr(parse("x"))
        g.union(x, g.add_expr(parse("(* x 1)")))
        g.rebuild()
        for side in WitnessSide:
            w = extract_witness(g, x, side)
            assert w.expr == Expr.var("x")
            assert w.attains

    def test_every_reachable_class_has_a_smallest_term(self):
        """Test the smallest-term pass covers a cycle through two classes."""
        g = EGraph({"x": Interval(1, 2)})
        root = g.add_expr(parse("(+ x 0)"))
        g.union(root, g.add_expr(parse("x")))
        g.union(g.add_expr(parse("(neg (neg x))")), root)
        g.rebuild()
        extractor = WitnessExtractor(g)
        extractor.run(root)
        assert set(extractor.smallest) == set(extractor.fronts)
        assert extractor.smallest[g.find(root)].expr == Expr.var("x")

    def test_saturated_quadratic(self, default_rules):
        """Test witnesses exist for x^2 - 2x + 1 after saturation with its cycles."""
        g = EGraph({"x": Interval(1, 2)})
        root = g.add_expr(parse("(+ (- (sq x) (* 2 x)) 1)"))
        saturate(g, default_rules, RunConfig(max_iterations=3, max_nodes=5_000))
        root = g.find(root)
        lo, hi = extract_witnesses(g, root)
        assert g.data(root).issubset(lo.interval)
        assert g.data(root).issubset(hi.interval)
        assert lo.attains and hi.attains

    def test_expired_deadline_still_gives_witnesses(self, ratio_graph):
        """Test a deadline already past leaves the smallest terms as witnesses."""
        g, root = ratio_graph
        g.union(root, g.add_expr(parse("(recip (+ 1 (/ 1 y)))")))
        g.rebuild()
        lo, hi = extract_witnesses(g, root, deadline=0.0)
        assert to_sexpr(lo.expr) == "(/ y (+ 1 y))"
        assert lo.expr == hi.expr
