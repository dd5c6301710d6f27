"""
Rewrite rules service.

Pattern language, e-matching, interval guards and the default rule catalog.
"""

from .catalog import DEFAULT_MANIFEST, rule_set
from .patterns import Pattern, PatternNode, PatternVar, Subst, ematch, parse_pattern
from .rules import Rule, apply_rule, check_guard, load_manifest, parse_manifest

__all__ = [
    "DEFAULT_MANIFEST",
    "Pattern",
    "PatternNode",
    "PatternVar",
    "Rule",
    "Subst",
    "apply_rule",
    "check_guard",
    "ematch",
    "load_manifest",
    "parse_manifest",
    "parse_pattern",
    "rule_set",
]
