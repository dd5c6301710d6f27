"""
Interval e-class analysis.

Each e-class carries an Interval that encloses the concrete values of every
term it represents:
- make interprets one e-node by the natural extension of its operator over
  the current intervals of its child classes
- merge_data combines two classes with the lattice meet
- propagate re-runs make over parents of narrowed classes until nothing changes
- modify materialises a constant node in classes narrowed to a single float

Intervals only ever narrow, so the worklist terminates on cyclic graphs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence

from shared.errors import DomainError, EmptyMeet, EvalError
from shared.models.expression import DomainEnv
from shared.models.interval import TOP, Interval, extend, point
from shared.models.operators import OpKind

if TYPE_CHECKING:
    from services.graph.egraph import ClassId, EGraph, ENode


logger = logging.getLogger(__name__)


@dataclass
class PropagationStats:
    """Counters from one propagate call."""
    visited: int = 0
    narrowed: int = 0
    constants_added: int = 0


class IntervalAnalysis:
    """Interval domain hooks used by EGraph; holds the variable domains."""

    def __init__(self, domains: Optional[DomainEnv] = None):
        self.domains: Dict[str, Interval] = dict(domains or {})

    def bind(self, domains: DomainEnv) -> None:
        """Add variable domains; rebinding a variable to a different interval is an error."""
        for name, interval in domains.items():
            current = self.domains.get(name)
            if current is not None and current != interval:
                raise ValueError(
                    f"variable '{name}' already bound to {current}, cannot rebind to {interval}"
                )
            self.domains[name] = interval

    def make(self, node: "ENode", child_data: Sequence[Interval]) -> Interval:
        if node.op is OpKind.CONST:
            assert node.value is not None
            return point(node.value)
        if node.op is OpKind.VAR:
            try:
                return self.domains[node.name]  # type: ignore[index]
            except KeyError:
                raise EvalError(f"no domain given for variable '{node.name}'") from None
        return extend(node.op, child_data, node.exponent)

    def make_in(self, g: "EGraph", node: "ENode") -> Interval:
        """make with child data read from the graph."""
        return self.make(node, [g.data(c) for c in node.children])

    def merge_data(self, a: Interval, b: Interval) -> Interval:
        return a.meet(b)

    def modify(self, g: "EGraph", c: "ClassId") -> Optional["ENode"]:
        """Add `const v` to a class whose interval is exactly [v, v]."""
        c = g.find(c)
        data = g.data(c)
        if not data.is_degenerate:
            return None
        if any(n.op is OpKind.CONST for n in g.nodes(c)):
            return None

        from services.graph.egraph import ENode

        node = ENode.const(Fraction(data.lo))
        const_class = g.add(node)
        g.union(c, const_class)
        logger.debug(f"Materialised constant {data.lo!r} in e-class {c}")
        return node


def merge_data(a: Interval, b: Interval) -> Interval:
    """Meet of two class intervals; EmptyMeet signals a soundness violation."""
    return a.meet(b)


def interpret(g: "EGraph", node: "ENode") -> Interval:
    """Interval of a single e-node; nodes undefined everywhere contribute top."""
    try:
        return g.analysis.make_in(g, node)
    except DomainError:
        return TOP


def propagate(g: "EGraph", dirty: Optional[Iterable["ClassId"]] = None) -> PropagationStats:
    """
    Bring class intervals to a fixpoint.

    With `dirty` given, only parents of those classes are re-interpreted
    (incremental mode used by rebuild). Without it every class is first
    re-derived from all of its nodes, then the worklist runs as usual.
    """
    stats = PropagationStats()
    worklist: List["ClassId"] = []

    if dirty is None:
        for c in g.class_ids():
            interval = g.data(c)
            for node in g.nodes(c):
                interval = _narrow(interval, interpret(g, node), c)
            stats.visited += 1
            if _store(g, c, interval, stats):
                worklist.append(c)
    else:
        worklist.extend(dirty)

    while worklist:
        batch = _dedupe(g, worklist)
        worklist = []
        for c in batch:
            if g.analysis.modify(g, c) is not None:
                stats.constants_added += 1
            for parent_node, parent_class in g.parents(c):
                stats.visited += 1
                p = g.find(parent_class)
                interval = _narrow(g.data(p), interpret(g, parent_node), p)
                if _store(g, p, interval, stats):
                    worklist.append(p)

    if stats.narrowed:
        logger.debug(
            f"Propagation narrowed {stats.narrowed} interval(s) over {stats.visited} visit(s)"
        )
    return stats


def _narrow(current: Interval, candidate: Interval, c: "ClassId") -> Interval:
    try:
        return current.meet(candidate)
    except EmptyMeet as exc:
        raise exc.annotate(class_id=c) from None


def _store(g: "EGraph", c: "ClassId", interval: Interval, stats: PropagationStats) -> bool:
    if interval == g.data(c):
        return False
    g.set_data(c, interval)
    stats.narrowed += 1
    return True


def _dedupe(g: "EGraph", ids: Iterable["ClassId"]) -> List["ClassId"]:
    seen: Dict["ClassId", None] = {}
    for c in ids:
        seen.setdefault(g.find(c), None)
    return list(seen)
