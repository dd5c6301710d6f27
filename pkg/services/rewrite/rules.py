"""
Rewrite rules, interval guards and the rule manifest format.

Manifest lines look like

    version: 1
    # comment
    div-cancel: (/ ?a ?a) => 1 if (nonzero ?a)

Guards are conjunctions of `(pred E)` joined by `and`, where pred is one of
nonzero, nonneg or pos and E is a pattern over the rule's left-hand variables.
E is bounded by the natural extension over the matched classes, tightened by
the class interval of E's instance when the graph already contains it.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from shared.errors import DomainError, EmptyMeet, ManifestError, ParseError
from shared.models.interval import Interval, extend, point
from shared.models.operators import OpKind
from shared.utils.sexpr import Atom, SList, read_all
from services.graph.egraph import ClassId, EGraph
from services.rewrite.patterns import (
    Pattern,
    PatternVar,
    Subst,
    build_pattern,
    instantiate,
    lookup_instance,
    pattern_vars,
)

logger = logging.getLogger(__name__)

_RULE_NAME = re.compile(r"^[a-z][a-z0-9-]*$")
_GUARD_SPLIT = re.compile(r"\s+if\s+")


class Predicate(str, Enum):
    NONZERO = "nonzero"
    NONNEG = "nonneg"
    POS = "pos"

    def holds(self, interval: Interval) -> bool:
        if self is Predicate.NONZERO:
            return not interval.contains(0.0)
        if self is Predicate.NONNEG:
            return interval.lo >= 0
        return interval.lo > 0


@dataclass(frozen=True)
class GuardCondition:
    predicate: Predicate
    term: Pattern

    def __str__(self) -> str:
        return f"({self.predicate.value} {self.term})"


@dataclass(frozen=True)
class Rule:
    """Named rewrite lhs => rhs, applied only where every guard condition holds."""
    name: str
    lhs: Pattern
    rhs: Pattern
    guard: Tuple[GuardCondition, ...] = ()

    def __post_init__(self) -> None:
        if isinstance(self.lhs, PatternVar):
            raise ValueError(f"rule '{self.name}': left-hand side cannot be a bare variable")
        bound = set(pattern_vars(self.lhs))
        unbound = [v for v in pattern_vars(self.rhs) if v not in bound]
        for condition in self.guard:
            unbound.extend(v for v in pattern_vars(condition.term) if v not in bound)
        if unbound:
            raise ValueError(
                f"rule '{self.name}': variables not bound by the left-hand side: "
                + ", ".join(f"?{v}" for v in dict.fromkeys(unbound))
            )

    @property
    def is_guarded(self) -> bool:
        return bool(self.guard)

    def __str__(self) -> str:
        text = f"{self.name}: {self.lhs} => {self.rhs}"
        if self.guard:
            text += " if " + " and ".join(str(c) for c in self.guard)
        return text


# === Guards and application ===

def guard_interval(term: Pattern, subst: Subst, g: EGraph) -> Interval:
    """Interval of a guard term under `subst`; DomainError propagates."""
    interval, _ = _bound_term(term, subst, g)
    return interval


def _bound_term(term: Pattern, subst: Subst, g: EGraph) -> Tuple[Interval, Optional[ClassId]]:
    if isinstance(term, PatternVar):
        c = g.find(subst[term.name])
        return g.data(c), c
    if term.op is OpKind.CONST:
        assert term.value is not None
        c = lookup_instance(term, subst, g)
        return point(term.value), c
    if term.op is OpKind.VAR:
        c = lookup_instance(term, subst, g)
        if c is None:
            raise DomainError(f"guard mentions variable '{term.name}' that is not in the graph")
        return g.data(c), c

    bounds = [_bound_term(child, subst, g) for child in term.children]
    interval = extend(term.op, [b for b, _ in bounds], term.exponent)
    c = lookup_instance(term, subst, g) if all(k is not None for _, k in bounds) else None
    if c is not None:
        interval = interval.meet(g.data(c))
    return interval, c


def check_guard(rule: Rule, subst: Subst, g: EGraph) -> bool:
    """
    True when every guard condition holds on the current class intervals.

    A guard term undefined everywhere fails the guard. An empty meet between
    a guard term and its class is a soundness violation and propagates with
    the rule name attached.
    """
    for condition in rule.guard:
        try:
            interval = guard_interval(condition.term, subst, g)
        except DomainError:
            return False
        except EmptyMeet as exc:
            raise exc.annotate(rule=rule.name) from None
        if not condition.predicate.holds(interval):
            return False
    return True


def apply_rule(rule: Rule, subst: Subst, target: ClassId, g: EGraph) -> bool:
    """
    Add the instantiated right-hand side and union it with `target`.

    Returns True when the graph changed. A right-hand side that is undefined
    everywhere (DomainError) is skipped.
    """
    before = g.version
    try:
        rhs_class = instantiate(rule.rhs, subst, g)
        g.union(target, rhs_class)
    except DomainError as exc:
        logger.debug(f"Rule '{rule.name}' skipped: {exc}")
        return g.version != before
    except EmptyMeet as exc:
        raise exc.annotate(rule=rule.name) from None
    return g.version != before


# === Manifest ===

def parse_rule(line: str, line_number: int = 0) -> Rule:
    """Parse one `name: lhs => rhs [if guard]` line."""
    name, sep, body = line.partition(":")
    name = name.strip()
    if not sep or not _RULE_NAME.match(name):
        raise ManifestError(f"expected 'name: lhs => rhs', got '{line.strip()}'", line_number)
    lhs_text, arrow, rest = body.partition("=>")
    if not arrow:
        raise ManifestError(f"rule '{name}' is missing '=>'", line_number)
    parts = _GUARD_SPLIT.split(rest, maxsplit=1)
    rhs_text = parts[0]
    guard_text = parts[1] if len(parts) == 2 else ""

    try:
        lhs = _single_pattern(lhs_text, "left-hand side")
        rhs = _single_pattern(rhs_text, "right-hand side")
        guard = _parse_guard(guard_text) if guard_text else ()
        return Rule(name, lhs, rhs, guard)
    except (ParseError, ValueError) as exc:
        raise ManifestError(f"rule '{name}': {exc}", line_number) from exc


def _single_pattern(text: str, what: str) -> Pattern:
    forms = read_all(text)
    if len(forms) != 1:
        raise ParseError(f"{what} must be exactly one pattern, found {len(forms)}")
    return build_pattern(forms[0])


def _parse_guard(text: str) -> Tuple[GuardCondition, ...]:
    forms = read_all(text)
    conditions: List[GuardCondition] = []
    for index, form in enumerate(forms):
        if index % 2 == 1:
            if not (isinstance(form, Atom) and form.text == "and"):
                raise ParseError("guard conditions must be joined with 'and'", form.position)
            continue
        if not isinstance(form, SList) or len(form.items) != 2 or not isinstance(form.items[0], Atom):
            raise ParseError("guard conditions look like (pred term)", form.position)
        head = form.items[0]
        try:
            predicate = Predicate(head.text)
        except ValueError:
            raise ParseError(f"unknown guard predicate '{head.text}'", head.position) from None
        conditions.append(GuardCondition(predicate, build_pattern(form.items[1])))
    if not conditions or len(forms) % 2 == 0:
        raise ParseError("dangling 'and' in guard")
    return tuple(conditions)


@dataclass(frozen=True)
class Manifest:
    version: int
    rules: Tuple[Rule, ...]


def parse_manifest_document(text: str) -> Manifest:
    version = 0
    rules: List[Rule] = []
    names = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("version:"):
            if version or rules:
                raise ManifestError("'version:' must be the first entry", number)
            token = line.partition(":")[2].strip()
            if not token.isdigit() or int(token) < 1:
                raise ManifestError(f"bad manifest version '{token}'", number)
            version = int(token)
            continue
        rule = parse_rule(line, number)
        if rule.name in names:
            raise ManifestError(f"duplicate rule name '{rule.name}'", number)
        names.add(rule.name)
        rules.append(rule)
    if not version:
        raise ManifestError("manifest has no 'version: N' header")
    return Manifest(version, tuple(rules))


def parse_manifest(text: str) -> List[Rule]:
    """Rules of a manifest in file order."""
    return list(parse_manifest_document(text).rules)


def load_manifest(path: Union[str, Path]) -> List[Rule]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read rule manifest {path}: {exc}") from exc
    rules = parse_manifest(text)
    logger.info(f"Loaded {len(rules)} rule(s) from {path}")
    return rules
