"""
Witness extraction.

The class interval is a meet over many members, so no single represented
term has to reach both of its bounds. For each side we look for a member
whose own natural extension reaches the class bound on that side, preferring
small terms.

Extraction runs in two passes over the classes reachable from the root:
1. Smallest terms: every class gets its smallest represented term, iterated
   to a fixpoint. This pass is never cut short, so every class has at least
   one candidate.
2. Fronts: each class keeps a small front of candidate terms (best lower
   bound, best upper bound, narrowest, smallest) built from its children's
   fronts. Only classes whose children changed are revisited, for at most
   `max_rounds` rounds or until the deadline.
"""

import itertools
import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from shared.errors import DomainError
from shared.models.expression import Expr
from shared.models.interval import TOP, Interval, extend, point
from shared.models.operators import OpKind
from shared.models.reports import WitnessSide
from shared.utils.sexpr import format_rational
from services.graph.egraph import ClassId, EGraph, ENode

logger = logging.getLogger(__name__)

FRONT_LIMIT = 4
MAX_ROUNDS = 12


@dataclass(frozen=True)
class Candidate:
    expr: Expr
    interval: Interval
    size: int
    text: str


@dataclass(frozen=True)
class Witness:
    """A represented term, its own interval, and whether it reaches the class bound."""
    expr: Expr
    interval: Interval
    attains: bool


def term_text(node: ENode, child_texts: Sequence[str]) -> str:
    """S-expression of a node over already printed children."""
    if node.op is OpKind.CONST:
        assert node.value is not None
        return format_rational(node.value)
    if node.op is OpKind.VAR:
        return str(node.name)
    parts = [node.op.value, *child_texts]
    if node.op is OpKind.POW:
        parts.append(str(node.exponent))
    return "(" + " ".join(parts) + ")"


class WitnessExtractor:
    """Builds candidate fronts for every class reachable from a root."""

    def __init__(
        self,
        g: EGraph,
        front_limit: int = FRONT_LIMIT,
        max_rounds: int = MAX_ROUNDS,
        deadline: Optional[float] = None,
    ):
        self.g = g
        self.deadline = deadline
        self.front_limit = front_limit
        self.max_rounds = max_rounds
        self.smallest: Dict[ClassId, Candidate] = {}
        self.fronts: Dict[ClassId, List[Candidate]] = {}

    def run(self, root: ClassId) -> None:
        order = self._reachable(root)
        self._seed(order)
        self._improve(order)

    def witness(self, c: ClassId, side: WitnessSide) -> Witness:
        c = self.g.find(c)
        if c not in self.fronts:
            self.run(c)
        front = self.fronts[c]
        bound = self.g.data(c)
        if side is WitnessSide.LOWER:
            hits = [k for k in front if k.interval.lo >= bound.lo]
        else:
            hits = [k for k in front if k.interval.hi <= bound.hi]
        if hits:
            best = min(hits, key=lambda k: (k.size, k.text))
            return Witness(best.expr, best.interval, True)
        smallest = min(front, key=lambda k: (k.size, k.text))
        return Witness(smallest.expr, smallest.interval, False)

    def _reachable(self, root: ClassId) -> List[ClassId]:
        """Classes reachable from root; each class is pushed at most once."""
        g = self.g
        root = g.find(root)
        seen: Dict[ClassId, None] = {root: None}
        stack = [root]
        while stack:
            c = stack.pop()
            for node in g.nodes(c):
                for child in node.children:
                    child = g.find(child)
                    if child not in seen:
                        seen[child] = None
                        stack.append(child)
        return list(seen)

    # === Smallest terms ===

    def _seed(self, order: List[ClassId]) -> None:
        """Smallest term per class by (size, text), iterated to a fixpoint."""
        best: Dict[ClassId, Tuple[int, str, ENode]] = {}
        changed = True
        passes = 0
        while changed:
            changed = False
            passes += 1
            for c in order:
                for node in self.g.nodes(c):
                    key = self._smallest_key(node, best)
                    if key is None:
                        continue
                    current = best.get(c)
                    if current is None or key < current[:2]:
                        best[c] = (key[0], key[1], node)
                        changed = True
        logger.debug(f"Smallest terms settled after {passes} pass(es) over {len(order)} class(es)")

        # children of a chosen node are strictly smaller, so build in size order
        for c in sorted(best, key=lambda c: best[c][0]):
            size, text, node = best[c]
            self.smallest[c] = self._build(node, size, text)
        self.fronts = {c: [self.smallest[c]] for c in order}

    def _smallest_key(self, node: ENode, best: Dict[ClassId, Tuple[int, str, ENode]]) -> Optional[Tuple[int, str]]:
        if node.op.is_leaf:
            return 1, term_text(node, ())
        children = [best.get(self.g.find(child)) for child in node.children]
        if any(entry is None for entry in children):
            return None
        size = 1 + sum(entry[0] for entry in children)  # type: ignore[index]
        return size, term_text(node, [entry[1] for entry in children])  # type: ignore[index]

    def _build(self, node: ENode, size: int, text: str) -> Candidate:
        if node.op is OpKind.CONST:
            assert node.value is not None
            return Candidate(Expr.const(node.value), point(node.value), 1, text)
        if node.op is OpKind.VAR:
            assert node.name is not None
            return Candidate(Expr.var(node.name), self.g.analysis.make(node, []), 1, text)
        parts = [self.smallest[self.g.find(child)] for child in node.children]
        expr = Expr(node.op, tuple(k.expr for k in parts), exponent=node.exponent)
        try:
            interval = extend(node.op, [k.interval for k in parts], node.exponent)
        except DomainError:
            interval = TOP
        return Candidate(expr, interval, size, text)

    # === Fronts ===

    def _improve(self, order: List[ClassId]) -> None:
        g = self.g
        users: Dict[ClassId, List[ClassId]] = {}
        for c in order:
            for node in g.nodes(c):
                for child in dict.fromkeys(g.find(k) for k in node.children):
                    users.setdefault(child, []).append(c)

        dirty = list(order)
        for round_number in range(self.max_rounds):
            changed: List[ClassId] = []
            for c in dirty:
                if self.deadline is not None and time.perf_counter() >= self.deadline:
                    logger.warning(
                        f"⚠️ Witness search stopped at the time budget in round {round_number + 1}"
                    )
                    return
                front = self._front_for(c)
                if front != self.fronts[c]:
                    self.fronts[c] = front
                    changed.append(c)
            if not changed:
                logger.debug(f"Witness fronts stable after {round_number + 1} round(s)")
                return
            dirty = list(dict.fromkeys(user for c in changed for user in users.get(c, ())))

    def _front_for(self, c: ClassId) -> List[Candidate]:
        candidates: List[Candidate] = list(self.fronts[c])
        for node in self.g.nodes(c):
            candidates.extend(self._node_candidates(node))
        return self._select(candidates)

    def _node_candidates(self, node: ENode) -> List[Candidate]:
        if node.op.is_leaf:
            return []
        child_fronts = [self.fronts.get(self.g.find(child)) for child in node.children]
        if any(front is None for front in child_fronts):
            return []
        out: List[Candidate] = []
        for combo in itertools.product(*child_fronts):  # type: ignore[arg-type]
            try:
                interval = extend(node.op, [k.interval for k in combo], node.exponent)
            except DomainError:
                continue
            expr = Expr(node.op, tuple(k.expr for k in combo), exponent=node.exponent)
            text = term_text(node, [k.text for k in combo])
            out.append(Candidate(expr, interval, 1 + sum(k.size for k in combo), text))
        return out

    def _select(self, candidates: List[Candidate]) -> List[Candidate]:
        unique: Dict[str, Candidate] = {}
        for k in candidates:
            unique.setdefault(k.text, k)
        pool = list(unique.values())
        picks = [
            min(pool, key=lambda k: (-k.interval.lo, k.size, k.text)),
            min(pool, key=lambda k: (k.interval.hi, k.size, k.text)),
            min(pool, key=lambda k: (k.interval.width(), k.size, k.text)),
            min(pool, key=lambda k: (k.size, k.text)),
        ]
        chosen: Dict[str, Candidate] = {}
        for k in picks + sorted(pool, key=lambda k: (k.size, k.text)):
            chosen.setdefault(k.text, k)
            if len(chosen) >= self.front_limit:
                break
        return sorted(chosen.values(), key=lambda k: (k.size, k.text))


def extract_witness(g: EGraph, c: ClassId, side: WitnessSide) -> Witness:
    """Witness for one side of a class interval."""
    extractor = WitnessExtractor(g)
    extractor.run(c)
    return extractor.witness(c, side)


def extract_witnesses(
    g: EGraph, c: ClassId, deadline: Optional[float] = None
) -> Tuple[Witness, Witness]:
    """Lower and upper witnesses sharing one extraction pass."""
    extractor = WitnessExtractor(g, deadline=deadline)
    extractor.run(c)
    return extractor.witness(c, WitnessSide.LOWER), extractor.witness(c, WitnessSide.UPPER)
