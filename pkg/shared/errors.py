"""
Exception hierarchy for the interval e-graph platform.

Every error raised on purpose by the engine derives from BoundsError so the
CLI can map failures onto exit codes:
- input problems (parse, arity, manifest, domain) exit with 2
- soundness aborts (EmptyMeet) exit with 3
"""

from typing import Any, Optional


class BoundsError(Exception):
    """Base class for all engine errors."""


class IntervalError(BoundsError, ValueError):
    """An interval was constructed with NaN or reversed endpoints."""


class ParseError(BoundsError):
    """Malformed s-expression input."""

    def __init__(self, message: str, position: int = -1):
        self.position = position
        if position >= 0:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class ArityError(ParseError):
    """An operator was applied to the wrong number of operands."""


class EvalError(BoundsError):
    """Concrete evaluation left the domain of an operator."""


class DomainError(BoundsError):
    """An interval argument lies entirely outside an operator's domain."""


class ManifestError(BoundsError):
    """A rule manifest line could not be understood."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        if line:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyMeet(BoundsError):
    """
    Two sound over-approximations of the same concrete set failed to intersect.

    This can only happen through an unsound rule or a rounding bug, so the
    analysis aborts and reports where the contradiction surfaced.
    """

    def __init__(
        self,
        left: Any,
        right: Any,
        class_id: Optional[int] = None,
        rule: Optional[str] = None,
    ):
        self.left = left
        self.right = right
        self.class_id = class_id
        self.rule = rule
        super().__init__(self.describe())

    def describe(self) -> str:
        message = f"empty meet of {self.left} and {self.right}"
        if self.class_id is not None:
            message += f" in e-class {self.class_id}"
        if self.rule:
            message += f" after applying rule '{self.rule}'"
        return message

    def annotate(self, class_id: Optional[int] = None, rule: Optional[str] = None) -> "EmptyMeet":
        """Attach location details without losing earlier ones."""
        if class_id is not None and self.class_id is None:
            self.class_id = class_id
        if rule and not self.rule:
            self.rule = rule
        self.args = (self.describe(),)
        return self
