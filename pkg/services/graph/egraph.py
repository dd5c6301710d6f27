"""
E-graph with hashconsed e-nodes, union-find classes and deferred rebuilding.

The graph owns an IntervalAnalysis, so every e-class carries an interval:
- add interprets fresh nodes with the analysis (make)
- union meets the two class intervals (merge_data)
- rebuild restores congruence and then runs the analysis worklist (propagate)

Unions only record work; callers run rebuild() before e-matching. Class ids
returned by the public API are canonical at the time of the call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from shared.errors import EmptyMeet
from shared.models.expression import DomainEnv, Expr
from shared.models.interval import Interval
from shared.models.operators import OpKind
from services.graph.analysis import IntervalAnalysis, propagate

logger = logging.getLogger(__name__)

ClassId = int


@dataclass(frozen=True)
class ENode:
    """Operator applied to child e-classes, plus the leaf or exponent payload."""
    op: OpKind
    children: Tuple[ClassId, ...] = ()
    value: Optional[Fraction] = None
    name: Optional[str] = None
    exponent: Optional[int] = None

    @classmethod
    def const(cls, value: Fraction) -> "ENode":
        return cls(OpKind.CONST, value=Fraction(value))

    @classmethod
    def var(cls, name: str) -> "ENode":
        return cls(OpKind.VAR, name=name)

    @property
    def label(self) -> str:
        if self.op is OpKind.CONST:
            assert self.value is not None
            if self.value.denominator == 1:
                return str(self.value.numerator)
            return f"{self.value.numerator}/{self.value.denominator}"
        if self.op is OpKind.VAR:
            return str(self.name)
        if self.op is OpKind.POW:
            return f"pow {self.exponent}"
        return self.op.value


@dataclass
class EClass:
    id: ClassId
    nodes: Dict[ENode, None]
    data: Interval
    parents: List[Tuple[ENode, ClassId]] = field(default_factory=list)


class UnionFind:
    """Union-find over dense integer ids with path halving."""

    def __init__(self) -> None:
        self.parent: List[int] = []

    def make_set(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union_into(self, root: int, other: int) -> int:
        self.parent[other] = root
        return root

    def __len__(self) -> int:
        return len(self.parent)


class EGraph:
    """
    Hashconsed e-graph with an interval analysis.

    `version` increases whenever a class or node is created, two classes are
    merged or a class interval narrows; saturation compares it across
    iterations.
    """

    def __init__(self, domains: Optional[DomainEnv] = None, analysis: Optional[IntervalAnalysis] = None):
        self.analysis = analysis or IntervalAnalysis(domains)
        if analysis is not None and domains:
            self.analysis.bind(domains)
        self._uf = UnionFind()
        self._classes: Dict[ClassId, EClass] = {}
        self._hashcons: Dict[ENode, ClassId] = {}
        self._pending: List[ClassId] = []
        self._analysis_pending: List[ClassId] = []
        self.version = 0

    # === Queries ===

    def find(self, c: ClassId) -> ClassId:
        return self._uf.find(c)

    def canonicalize(self, node: ENode) -> ENode:
        if not node.children:
            return node
        children = tuple(self._uf.find(c) for c in node.children)
        if children == node.children:
            return node
        return replace(node, children=children)

    def lookup(self, node: ENode) -> Optional[ClassId]:
        """Class of a node if an equal canonical node is stored, without inserting."""
        c = self._hashcons.get(self.canonicalize(node))
        return None if c is None else self.find(c)

    def data(self, c: ClassId) -> Interval:
        return self._classes[self.find(c)].data

    def set_data(self, c: ClassId, interval: Interval) -> None:
        eclass = self._classes[self.find(c)]
        if interval != eclass.data:
            eclass.data = interval
            self.version += 1

    def nodes(self, c: ClassId) -> List[ENode]:
        return list(self._classes[self.find(c)].nodes)

    def parents(self, c: ClassId) -> List[Tuple[ENode, ClassId]]:
        return list(self._classes[self.find(c)].parents)

    def eclass(self, c: ClassId) -> EClass:
        return self._classes[self.find(c)]

    def class_ids(self) -> List[ClassId]:
        """Canonical class ids in creation order."""
        return [c for c in self._classes if self._uf.find(c) == c]

    def classes(self) -> Iterator[EClass]:
        for c in self.class_ids():
            yield self._classes[c]

    @property
    def class_count(self) -> int:
        return len(self._classes)

    @property
    def node_count(self) -> int:
        return len(self._hashcons)

    @property
    def is_clean(self) -> bool:
        return not self._pending and not self._analysis_pending

    def classes_by_op(self) -> Dict[OpKind, List[ClassId]]:
        """Canonical classes grouped by the operators of their nodes."""
        index: Dict[OpKind, List[ClassId]] = {}
        for eclass in self.classes():
            for op in dict.fromkeys(n.op for n in eclass.nodes):
                index.setdefault(op, []).append(eclass.id)
        return index

    # === Mutation ===

    def add(self, node: ENode) -> ClassId:
        """Insert a node, returning the existing class of a congruent node if any."""
        node = self.canonicalize(node)
        existing = self._hashcons.get(node)
        if existing is not None:
            return self.find(existing)

        data = self.analysis.make_in(self, node)
        c = self._uf.make_set()
        self._classes[c] = EClass(id=c, nodes={node: None}, data=data)
        for child in dict.fromkeys(node.children):
            self._classes[self.find(child)].parents.append((node, c))
        self._hashcons[node] = c
        self.version += 1

        if data.is_degenerate and node.op is not OpKind.CONST:
            self.analysis.modify(self, c)
        return self.find(c)

    def add_expr(self, e: Expr, domains: Optional[DomainEnv] = None) -> ClassId:
        """Insert an expression tree bottom-up and return its root class."""
        if domains:
            self.analysis.bind(domains)
        if e.op is OpKind.CONST:
            assert e.value is not None
            return self.add(ENode.const(e.value))
        if e.op is OpKind.VAR:
            assert e.name is not None
            return self.add(ENode.var(e.name))
        children = tuple(self.add_expr(child) for child in e.children)
        return self.add(ENode(e.op, children, exponent=e.exponent))

    def union(self, a: ClassId, b: ClassId) -> ClassId:
        """
        Merge two classes; the merged interval is the meet of both.

        Raises EmptyMeet, leaving the graph unchanged, when the intervals are
        disjoint.
        """
        a, b = self.find(a), self.find(b)
        if a == b:
            return a
        ca, cb = self._classes[a], self._classes[b]
        try:
            merged = self.analysis.merge_data(ca.data, cb.data)
        except EmptyMeet as exc:
            raise exc.annotate(class_id=min(a, b)) from None

        # root keeps the longer parent list; ties go to the older class
        if (len(cb.parents), -b) > (len(ca.parents), -a):
            ca, cb = cb, ca
        root, other = ca.id, cb.id
        self._uf.union_into(root, other)
        ca.nodes.update(cb.nodes)
        ca.parents.extend(cb.parents)
        changed = merged != ca.data or merged != cb.data
        ca.data = merged
        del self._classes[other]

        self._pending.append(root)
        if changed:
            self._analysis_pending.append(root)
        self.version += 1
        return root

    def rebuild(self) -> int:
        """
        Restore congruence and the analysis fixpoint.

        Returns the number of congruence repairs (unions between congruent
        parents); a second call in a row returns 0.
        """
        repairs = 0
        while True:
            while self._pending or self._analysis_pending:
                while self._pending:
                    todo = dict.fromkeys(self.find(c) for c in self._pending)
                    self._pending = []
                    for c in todo:
                        repairs += self._repair(c)
                if self._analysis_pending:
                    dirty = self._analysis_pending
                    self._analysis_pending = []
                    propagate(self, dirty)
            late = self._reindex()
            if not late:
                break
            repairs += late
        if repairs:
            logger.debug(f"Rebuild performed {repairs} congruence repair(s)")
        return repairs

    def _repair(self, c: ClassId) -> int:
        eclass = self._classes[self.find(c)]
        stale, eclass.parents = eclass.parents, []
        for node, _ in stale:
            self._hashcons.pop(node, None)
        for node, parent in stale:
            self._hashcons[self.canonicalize(node)] = self.find(parent)

        repairs = 0
        unique: Dict[ENode, ClassId] = {}
        for node, parent in stale:
            node = self.canonicalize(node)
            seen = unique.get(node)
            if seen is not None and self.find(seen) != self.find(parent):
                self.union(seen, parent)
                repairs += 1
            unique[node] = self.find(parent)

        target = self._classes[self.find(c)]
        target.parents = list(unique.items()) + target.parents
        return repairs

    def _reindex(self) -> int:
        """
        Canonicalize every class and rebuild the hashcons from the class node
        sets. Congruent nodes left in two classes by unions made late in a
        repair pass are merged here; returns how many.
        """
        self._hashcons = {}
        late = 0
        for eclass in list(self._classes.values()):
            if self._uf.find(eclass.id) != eclass.id:
                continue
            eclass.nodes = dict.fromkeys(self.canonicalize(n) for n in eclass.nodes)
            eclass.parents = [(self.canonicalize(n), self.find(p)) for n, p in eclass.parents]
            for node in list(eclass.nodes):
                owner = self._hashcons.get(node)
                if owner is not None and self.find(owner) != self.find(eclass.id):
                    self.union(owner, eclass.id)
                    late += 1
                    break
                self._hashcons[node] = eclass.id
        return late

    # === Debug support ===

    def check_congruence(self) -> List[str]:
        """
        Full scan for invariant violations; an empty list means the graph is
        congruence closed and the hashcons agrees with the union-find.
        """
        problems: List[str] = []
        owner: Dict[ENode, ClassId] = {}
        for eclass in self.classes():
            for node in eclass.nodes:
                canon = self.canonicalize(node)
                if canon != node:
                    problems.append(f"non-canonical node {node} in class {eclass.id}")
                previous = owner.get(canon)
                if previous is not None and previous != eclass.id:
                    problems.append(
                        f"congruent node {canon.label} in classes {previous} and {eclass.id}"
                    )
                owner[canon] = eclass.id
                stored = self._hashcons.get(canon)
                if stored is None or self.find(stored) != eclass.id:
                    problems.append(f"hashcons entry for {canon.label} does not point at class {eclass.id}")
        for node, c in self._hashcons.items():
            if self.canonicalize(node) != node:
                problems.append(f"stale hashcons key {node}")
            elif owner.get(node) != self.find(c):
                problems.append(f"hashcons node {node.label} missing from class {self.find(c)}")
        return problems
