"""
S-expression reader shared by the expression parser and the rule manifest.

Atoms are identifiers, integers, decimals (with optional exponent), rationals
`p/q`, operator tokens, and `?name` pattern variables. The reader only builds
the nested structure; turning it into expressions or patterns is left to the
callers so both share one tokenizer and one set of error positions.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from shared.errors import ParseError

_TOKEN = re.compile(r"(?P<open>\()|(?P<close>\))|(?P<atom>[^\s()]+)|(?P<space>\s+)")
_DECIMAL = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")
_RATIONAL = re.compile(r"^[+-]?\d+/\d+$")
_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_.']*$")
_PATTERN_VAR = re.compile(r"^\?[A-Za-z_][A-Za-z0-9_]*$")

MAX_DEPTH = 100


@dataclass(frozen=True)
class Atom:
    text: str
    position: int


@dataclass(frozen=True)
class SList:
    items: Tuple["SExp", ...]
    position: int


SExp = Union[Atom, SList]


def read(text: str) -> SExp:
    """Read exactly one s-expression from text."""
    forms, _ = _read_forms(text, 0)
    if not forms:
        raise ParseError("empty input", 0)
    if len(forms) > 1:
        raise ParseError("unexpected trailing input", forms[1].position)
    return forms[0]


def read_all(text: str) -> List[SExp]:
    """Read a whitespace-separated sequence of s-expressions."""
    forms, _ = _read_forms(text, 0)
    return forms


def _read_forms(text: str, start: int) -> Tuple[List[SExp], int]:
    """
    Read forms iteratively with an explicit stack of open lists.

    Nesting is capped at MAX_DEPTH so that every later recursive walk over
    the result stays well inside the interpreter's recursion limit.
    """
    top: List[SExp] = []
    # (items, position of the '(') for every list still open
    open_lists: List[Tuple[List[SExp], int]] = []
    pos = start
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:  # pragma: no cover - the token regex accepts every character class
            raise ParseError(f"unreadable character {text[pos]!r}", pos)
        kind = match.lastgroup
        pos = match.end()
        if kind == "space":
            continue
        if kind == "open":
            if len(open_lists) >= MAX_DEPTH:
                raise ParseError(f"expression nested deeper than {MAX_DEPTH} levels", match.start())
            open_lists.append(([], match.start()))
            continue
        if kind == "close":
            if not open_lists:
                raise ParseError("unexpected ')'", match.start())
            items, opened = open_lists.pop()
            form: SExp = SList(tuple(items), opened)
        else:
            form = Atom(match.group("atom"), match.start())
        (open_lists[-1][0] if open_lists else top).append(form)
    if open_lists:
        raise ParseError("unclosed '('", open_lists[-1][1])
    return top, pos


def parse_number(text: str) -> Optional[Fraction]:
    """Exact rational value of a numeric atom, or None if it is not numeric."""
    if _RATIONAL.match(text):
        numerator, denominator = text.split("/")
        if int(denominator) == 0:
            raise ParseError(f"zero denominator in constant {text}")
        return Fraction(int(numerator), int(denominator))
    if _DECIMAL.match(text):
        return Fraction(text)
    return None


def is_identifier(text: str) -> bool:
    return bool(_IDENTIFIER.match(text))


def is_pattern_var(text: str) -> bool:
    return bool(_PATTERN_VAR.match(text))


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
