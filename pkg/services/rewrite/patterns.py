"""
Rewrite patterns and e-matching.

A pattern is an expression tree whose leaves may be `?name` variables. It is
matched against e-classes, not terms: a variable binds to a whole class and an
operator pattern matches any e-node of the class with the same operator and
payload whose children match recursively.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from shared.errors import ArityError, ParseError
from shared.models.operators import OpKind
from shared.utils.sexpr import (
    Atom,
    SExp,
    SList,
    format_rational,
    is_identifier,
    is_pattern_var,
    parse_number,
    read,
)
from services.graph.egraph import ClassId, EGraph, ENode

Subst = Dict[str, ClassId]


@dataclass(frozen=True)
class PatternVar:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class PatternNode:
    op: OpKind
    children: Tuple["Pattern", ...] = ()
    value: Optional[Fraction] = None
    name: Optional[str] = None
    exponent: Optional[int] = None

    def __str__(self) -> str:
        if self.op is OpKind.CONST:
            assert self.value is not None
            return format_rational(self.value)
        if self.op is OpKind.VAR:
            return str(self.name)
        parts = [self.op.value, *(str(c) for c in self.children)]
        if self.op is OpKind.POW:
            parts.append(str(self.exponent))
        return "(" + " ".join(parts) + ")"

    def matches_payload(self, node: ENode) -> bool:
        return (
            node.op is self.op
            and node.value == self.value
            and node.name == self.name
            and node.exponent == self.exponent
        )


Pattern = Union[PatternVar, PatternNode]


def pattern_vars(p: Pattern) -> Tuple[str, ...]:
    """Variables in first-occurrence order."""
    seen: Dict[str, None] = {}
    _collect(p, seen)
    return tuple(seen)


def _collect(p: Pattern, seen: Dict[str, None]) -> None:
    if isinstance(p, PatternVar):
        seen.setdefault(p.name, None)
        return
    for child in p.children:
        _collect(child, seen)


# === Parsing ===

def parse_pattern(text: str) -> Pattern:
    """Parse `(- ?a ?a)`-style pattern text."""
    return build_pattern(read(text))


def build_pattern(form: SExp) -> Pattern:
    if isinstance(form, Atom):
        return _pattern_atom(form)
    return _pattern_list(form)


def _pattern_atom(atom: Atom) -> Pattern:
    if is_pattern_var(atom.text):
        return PatternVar(atom.text[1:])
    value = parse_number(atom.text)
    if value is not None:
        return PatternNode(OpKind.CONST, value=value)
    if is_identifier(atom.text) and atom.text not in _OPERATOR_TOKENS:
        return PatternNode(OpKind.VAR, name=atom.text)
    raise ParseError(f"unrecognised pattern atom '{atom.text}'", atom.position)


def _pattern_list(form: SList) -> Pattern:
    if not form.items or not isinstance(form.items[0], Atom):
        raise ParseError("expected an operator at the head of a pattern", form.position)
    head = form.items[0]
    if head.text not in _OPERATOR_TOKENS:
        raise ParseError(f"unknown operator '{head.text}'", head.position)
    op = OpKind.from_token(head.text)
    operands = form.items[1:]
    if op is OpKind.POW:
        exponent = operands[1] if len(operands) == 2 else None
        k = parse_number(exponent.text) if isinstance(exponent, Atom) else None
        if k is None or k.denominator != 1 or k < 2:
            raise ArityError("pow patterns need a base and an integer exponent >= 2", form.position)
        base = build_pattern(operands[0])
        if k == 2:
            return PatternNode(OpKind.SQ, (base,))
        return PatternNode(OpKind.POW, (base,), exponent=int(k))
    if len(operands) != op.arity:
        raise ArityError(f"'{op.value}' expects {op.arity} operand(s), got {len(operands)}", form.position)
    return PatternNode(op, tuple(build_pattern(o) for o in operands))


_OPERATOR_TOKENS = frozenset(op.value for op in OpKind if not op.is_leaf)


# === E-matching ===

def ematch(
    p: Pattern,
    g: EGraph,
    limit: Optional[int] = None,
    index: Optional[Mapping[OpKind, Sequence[ClassId]]] = None,
    deadline: Optional[float] = None,
) -> List[Tuple[Subst, ClassId]]:
    """
    All (substitution, class) pairs where `p` is represented in the class.

    Classes are visited in creation order and nodes in insertion order, so the
    result order is deterministic. `index` is an optional op -> classes map
    built once per saturation iteration; `limit` caps the number of matches.
    Past `deadline` (a `time.perf_counter` value) the search stops early with
    the matches found so far.
    """
    if isinstance(p, PatternVar):
        roots: Sequence[ClassId] = g.class_ids()
    elif index is not None:
        roots = index.get(p.op, ())
    else:
        roots = [c for c in g.class_ids() if any(n.op is p.op for n in g.eclass(c).nodes)]

    results: List[Tuple[Subst, ClassId]] = []
    for c in roots:
        if deadline is not None and time.perf_counter() >= deadline:
            break
        for subst in match_class(p, c, g, {}):
            results.append((subst, c))
            if limit is not None and len(results) >= limit:
                return results
    return results


def match_class(p: Pattern, c: ClassId, g: EGraph, subst: Subst) -> Iterator[Subst]:
    c = g.find(c)
    if isinstance(p, PatternVar):
        bound = subst.get(p.name)
        if bound is None:
            yield {**subst, p.name: c}
        elif g.find(bound) == c:
            yield subst
        return
    for node in g.eclass(c).nodes:
        if p.matches_payload(node):
            yield from _match_children(p.children, node.children, g, subst)


def _match_children(
    patterns: Tuple[Pattern, ...],
    classes: Tuple[ClassId, ...],
    g: EGraph,
    subst: Subst,
) -> Iterator[Subst]:
    if not patterns:
        yield subst
        return
    for partial in match_class(patterns[0], classes[0], g, subst):
        yield from _match_children(patterns[1:], classes[1:], g, partial)


def instantiate(p: Pattern, subst: Mapping[str, ClassId], g: EGraph) -> ClassId:
    """Add the pattern's term under `subst` to the graph; DomainError propagates."""
    if isinstance(p, PatternVar):
        return g.find(subst[p.name])
    children = tuple(instantiate(child, subst, g) for child in p.children)
    return g.add(ENode(p.op, children, value=p.value, name=p.name, exponent=p.exponent))


def lookup_instance(p: Pattern, subst: Mapping[str, ClassId], g: EGraph) -> Optional[ClassId]:
    """Class of the pattern's term under `subst` if the graph already holds it."""
    if isinstance(p, PatternVar):
        return g.find(subst[p.name])
    children: List[ClassId] = []
    for child in p.children:
        found = lookup_instance(child, subst, g)
        if found is None:
            return None
        children.append(found)
    return g.lookup(ENode(p.op, tuple(children), value=p.value, name=p.name, exponent=p.exponent))
