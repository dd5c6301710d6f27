"""
Unit tests for the interval e-class analysis.
"""

from fractions import Fraction

import pytest

from shared.errors import EvalError
from shared.models.expression import natural_extension, parse
from shared.models.interval import TOP, Interval
from shared.models.operators import OpKind
from services.graph.analysis import IntervalAnalysis, interpret, merge_data, propagate
from services.graph.egraph import EGraph, ENode


@pytest.mark.unit
class TestMake:
    """Test single-node interpretation."""

    def test_sub_node(self):
        """Test make((- x x)) with x in [0,1]."""
        analysis = IntervalAnalysis({"x": Interval(0, 1)})
        node = ENode(OpKind.SUB, (0, 0))
        assert analysis.make(node, [Interval(0, 1), Interval(0, 1)]) == Interval(-1, 1)

    def test_const_node(self):
        """Test make(const 1) is the point [1,1]."""
        assert IntervalAnalysis().make(ENode.const(Fraction(1)), []) == Interval(1, 1)

    def test_recip_node(self):
        """Test make((recip y)) with y in [1,2]."""
        node = ENode(OpKind.RECIP, (0,))
        assert IntervalAnalysis().make(node, [Interval(1, 2)]) == Interval(0.5, 1)

    def test_unbound_variable(self):
        """Test a variable without a domain is an EvalError."""
        with pytest.raises(EvalError):
            IntervalAnalysis().make(ENode.var("q"), [])

    def test_interpret_maps_domain_errors_to_top(self):
        """Test a node undefined on its whole argument contributes top."""
        g = EGraph({"x": Interval(-2, -1), "y": Interval(1, 2)})
        x = g.add_expr(parse("x"))
        assert interpret(g, ENode(OpKind.SQRT, (x,))) == TOP


@pytest.mark.unit
class TestMergeData:
    """Test the class merge operator."""

    def test_meet(self):
        """Test merge_data is the meet."""
        assert merge_data(Interval(-1, 1), Interval(0, 0)) == Interval(0, 0)
        a = Interval(-3, 0.34)
        assert merge_data(a, a) == a

    def test_folded_three_way(self):
        """Test the three enclosures of one expression fold to [-1,0]."""
        folded = merge_data(merge_data(Interval(-3, 0.3333333333333334), Interval(-2, 0)), Interval(-1, 1))
        assert folded == Interval(-1, 0)


@pytest.mark.unit
class TestPropagate:
    """Test the fixpoint worklist."""

    def test_rewritten_ratio(self, ratio_graph):
        """Test y/(1+y) merged with recip(1 + 1/y) narrows to [1/2, 2/3]."""
        g, root = ratio_graph
        alt = g.add_expr(parse("(recip (+ 1 (/ 1 y)))"))
        g.union(root, alt)
        g.rebuild()
        data = g.data(root)
        assert data.lo == 0.5
        assert Fraction(2, 3) <= Fraction(data.hi) < Fraction(2, 3) + Fraction(1, 10**15)

    def test_acyclic_graph_matches_natural_extension(self, unit_env):
        """Test propagate reproduces the natural extension on a tree."""
        e = parse("(- (* x (- 2 (* x y))) (/ 1 y))")
        g = EGraph(unit_env)
        root = g.add_expr(e)
        stats = propagate(g)
        assert g.data(root) == natural_extension(e, unit_env)
        assert stats.narrowed == 0

    def test_self_referential_class_terminates(self):
        """Test x merged with (* x 1) keeps the domain of x."""
        g = EGraph({"x": Interval(0, 1)})
        x = g.add_expr(parse("x"))
        g.union(x, g.add_expr(parse("(* x 1)")))
        g.rebuild()
        propagate(g)
        assert g.data(x) == Interval(0, 1)
        assert g.check_congruence() == []

    def test_full_pass_narrows_from_every_node(self):
        """Test a full propagate re-derives classes from all member nodes."""
        g = EGraph({"x": Interval(0, 1)})
        diff = g.add_expr(parse("(- x x)"))
        g.rebuild()
        eclass = g.eclass(diff)
        eclass.nodes[ENode.const(Fraction(0))] = None
        stats = propagate(g)
        assert g.data(diff) == Interval(0, 0)
        assert stats.narrowed >= 1


@pytest.mark.unit
class TestModify:
    """Test constant materialisation."""

    def test_dependency_class_gets_zero(self):
        """Test x - x merged with a [0,0] class holds const 0."""
        g = EGraph({"x": Interval(0, 1)})
        diff = g.add_expr(parse("(- x x)"))
        other = g.add_expr(parse("(* x 0)"))
        g.union(diff, other)
        g.rebuild()
        assert g.data(diff) == Interval(0, 0)
        consts = [n for n in g.nodes(diff) if n.op is OpKind.CONST]
        assert consts == [ENode.const(Fraction(0))]

    def test_non_degenerate_class_untouched(self):
        """Test modify ignores non-degenerate classes."""
        g = EGraph({"x": Interval(1 / 3, 0.34)})
        x = g.add_expr(parse("x"))
        assert g.analysis.modify(g, x) is None

    def test_sum_of_constants(self):
        """Test (+ 1 1) gains const 2."""
        g = EGraph()
        c = g.add_expr(parse("(+ 1 1)"))
        g.rebuild()
        assert ENode.const(Fraction(2)) in g.nodes(c)
        assert g.analysis.modify(g, c) is None
