"""
Default rewrite catalog.

The catalog ships as an embedded manifest so a run can be reproduced from the
manifest version alone; `--rules` / BOUNDS_RULES_PATH replace it wholesale.
Rules are applied in the order listed here.
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import List, Optional, Tuple, Union

from services.rewrite.rules import Manifest, Rule, load_manifest, parse_manifest_document

logger = logging.getLogger(__name__)


DEFAULT_MANIFEST = """\
version: 1

# --- commutativity and associativity ---
add-comm: (+ ?a ?b) => (+ ?b ?a)
mul-comm: (* ?a ?b) => (* ?b ?a)
add-assoc: (+ (+ ?a ?b) ?c) => (+ ?a (+ ?b ?c))
add-assoc-rev: (+ ?a (+ ?b ?c)) => (+ (+ ?a ?b) ?c)
mul-assoc: (* (* ?a ?b) ?c) => (* ?a (* ?b ?c))
mul-assoc-rev: (* ?a (* ?b ?c)) => (* (* ?a ?b) ?c)

# --- distribution and factoring ---
mul-add-distribute: (* ?a (+ ?b ?c)) => (+ (* ?a ?b) (* ?a ?c))
mul-sub-distribute: (* ?a (- ?b ?c)) => (- (* ?a ?b) (* ?a ?c))
add-factor: (+ (* ?a ?b) (* ?a ?c)) => (* ?a (+ ?b ?c))
sub-factor: (- (* ?a ?b) (* ?a ?c)) => (* ?a (- ?b ?c))
div-add-distribute: (/ (+ ?a ?b) ?c) => (+ (/ ?a ?c) (/ ?b ?c))
div-sub-distribute: (/ (- ?a ?b) ?c) => (- (/ ?a ?c) (/ ?b ?c))
mul-div-assoc: (/ (* ?a ?b) ?c) => (* ?a (/ ?b ?c))
div-mul-assoc: (* ?a (/ ?b ?c)) => (/ (* ?a ?b) ?c)

# --- cancellation ---
sub-cancel: (- ?a ?a) => 0
div-cancel: (/ ?a ?a) => 1 if (nonzero ?a)
add-sub-cancel: (- (+ ?a ?b) ?b) => ?a
sub-sub-cancel: (- ?a (- ?a ?b)) => ?b
mul-div-cancel: (/ (* ?a ?b) ?b) => ?a if (nonzero ?b)

# --- identities ---
add-zero: (+ ?a 0) => ?a
mul-one: (* ?a 1) => ?a
mul-zero: (* ?a 0) => 0
div-one: (/ ?a 1) => ?a
neg-neg: (neg (neg ?a)) => ?a
recip-recip: (recip (recip ?a)) => ?a if (nonzero ?a)

# --- squares and reciprocals ---
mul-self: (* ?a ?a) => (sq ?a)
sq-unfold: (sq ?a) => (* ?a ?a)
div-to-recip: (/ ?a ?b) => (* ?a (recip ?b)) if (nonzero ?b)
recip-to-div: (* ?a (recip ?b)) => (/ ?a ?b) if (nonzero ?b)

# --- operator specific ---
sqrt-conj: (- (sqrt ?a) (sqrt ?b)) => (/ (- ?a ?b) (+ (sqrt ?a) (sqrt ?b))) if (nonneg ?a) and (nonneg ?b) and (nonzero (+ (sqrt ?a) (sqrt ?b)))
div-flip: (/ ?a ?b) => (/ (- ?b (- ?b ?a)) ?b) if (nonzero ?b)
div-sum-to-recip: (/ ?a (+ ?b ?a)) => (recip (+ 1 (/ ?b ?a))) if (nonzero ?a)

# --- quadratics ---
complete-square: (+ (+ (* ?a (sq ?x)) (* ?b ?x)) ?c) => (+ (* ?a (sq (+ ?x (/ (/ ?b 2) ?a)))) (- ?c (/ (sq (/ ?b 2)) ?a))) if (nonzero ?a)
complete-square-monic: (+ (- (sq ?x) (* ?b ?x)) ?c) => (+ (sq (- ?x (/ ?b 2))) (- ?c (/ (sq ?b) 4)))
complete-square-neg: (- (- (* ?b ?x) (* ?a (sq ?x))) ?c) => (neg (+ (* ?a (sq (- ?x (/ (/ ?b 2) ?a)))) (- ?c (/ (sq (/ ?b 2)) ?a)))) if (nonzero ?a)
quadratic-factor: (+ (+ (* ?a (sq ?x)) (* ?b ?x)) ?c) => (* ?a (* (- ?x (/ (+ (neg ?b) (sqrt (- (sq ?b) (* 4 (* ?a ?c))))) (* 2 ?a))) (- ?x (/ (- (neg ?b) (sqrt (- (sq ?b) (* 4 (* ?a ?c))))) (* 2 ?a))))) if (nonzero ?a) and (nonneg (- (sq ?b) (* 4 (* ?a ?c))))
quadratic-factor-monic: (+ (- (sq ?x) (* ?b ?x)) ?c) => (* (- ?x (/ (+ ?b (sqrt (- (sq ?b) (* 4 ?c)))) 2)) (- ?x (/ (- ?b (sqrt (- (sq ?b) (* 4 ?c)))) 2))) if (nonneg (- (sq ?b) (* 4 ?c)))
"""


@lru_cache(maxsize=1)
def default_manifest() -> Manifest:
    return parse_manifest_document(DEFAULT_MANIFEST)


def rule_set(path: Optional[Union[str, Path]] = None) -> List[Rule]:
    """The default catalog, or the manifest at `path` when given."""
    if path is not None:
        return load_manifest(path)
    return list(default_manifest().rules)


def rule_names(rules: List[Rule]) -> Tuple[str, ...]:
    return tuple(r.name for r in rules)
