"""
Outwardly rounded interval arithmetic over extended-real float endpoints.

An Interval is a pair of floats [lo, hi] enclosing a set of reals. Every
operation returns an enclosure of the exact real image of its arguments:
- finite endpoint candidates are computed exactly (error-free float
  transforms for sums and products, rationals otherwise) and rounded
  outward (lo toward -inf, hi toward +inf) with at most one float step
- infinite endpoints follow extended-real rules; indeterminate forms such as
  inf - inf or 0 * inf give the infinite endpoint on the affected side
- division or reciprocal by an interval containing zero gives the top interval
- sqrt clamps its argument to [0, hi]; a fully negative argument is a DomainError

Intervals are immutable values, so every function here is pure.
"""

from __future__ import annotations

import math
import operator
import sys
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from shared.errors import DomainError, EmptyMeet, IntervalError
from shared.models.operators import OpKind

INF = math.inf
MAX_FLOAT = sys.float_info.max
_MAX_EXACT = Fraction(MAX_FLOAT)

RealLike = Union[int, float, Fraction, Decimal, str]


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi] of extended reals; never empty, never NaN."""
    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo = float(self.lo)
        hi = float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise IntervalError(f"NaN endpoint in [{self.lo}, {self.hi}]")
        if lo > hi:
            raise IntervalError(f"reversed endpoints in [{lo}, {hi}]")
        if lo == INF or hi == -INF:
            raise IntervalError(f"interval [{lo}, {hi}] contains no real")
        # -0.0 and 0.0 must hash and compare identically
        object.__setattr__(self, "lo", lo + 0.0 if lo == 0 else lo)
        object.__setattr__(self, "hi", hi + 0.0 if hi == 0 else hi)

    def __str__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def is_top(self) -> bool:
        return self.lo == -INF and self.hi == INF

    def width(self) -> float:
        """hi - lo; +inf when either endpoint is infinite."""
        if math.isinf(self.lo) or math.isinf(self.hi):
            return INF
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        if math.isnan(x):
            raise ValueError("cannot test NaN for membership")
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def issubset(self, other: "Interval") -> bool:
        """Inclusion order: self ⊆ other."""
        return other.lo <= self.lo and self.hi <= other.hi

    def meet(self, other: "Interval") -> "Interval":
        """
        Greatest lower bound in the interval lattice (intersection).

        Sound enclosures of the same concrete set always intersect, so an
        empty result is reported as EmptyMeet rather than represented.
        """
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise EmptyMeet(self, other)
        if lo == self.lo and hi == self.hi:
            return self
        if lo == other.lo and hi == other.hi:
            return other
        return Interval(lo, hi)


TOP = Interval(-INF, INF)


def top() -> Interval:
    return TOP


# === Directed rounding ===

def _to_fraction(value: RealLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def round_down(exact: Fraction) -> float:
    """Largest float <= exact (or -inf below the float range)."""
    if exact > _MAX_EXACT:
        return MAX_FLOAT
    if exact < -_MAX_EXACT:
        return -INF
    nearest = float(exact)
    if Fraction(nearest) > exact:
        nearest = math.nextafter(nearest, -INF)
    return nearest


def round_up(exact: Fraction) -> float:
    """Smallest float >= exact (or +inf above the float range)."""
    if exact > _MAX_EXACT:
        return INF
    if exact < -_MAX_EXACT:
        return -MAX_FLOAT
    nearest = float(exact)
    if Fraction(nearest) < exact:
        nearest = math.nextafter(nearest, INF)
    return nearest


def _endpoint_down(value: RealLike) -> float:
    if isinstance(value, float) and math.isinf(value):
        return value
    return round_down(_to_fraction(value))


def _endpoint_up(value: RealLike) -> float:
    if isinstance(value, float) and math.isinf(value):
        return value
    return round_up(_to_fraction(value))


def round_outward(lo_exact: RealLike, hi_exact: RealLike) -> Interval:
    """
    Enclose the exact real interval [lo_exact, hi_exact] with float endpoints.

    Exactly representable endpoints are kept; others move one float outward
    from the correctly rounded value at most.
    """
    lo = _endpoint_down(lo_exact)
    hi = _endpoint_up(hi_exact)
    if lo > hi:
        raise IntervalError(f"round_outward called with reversed bounds {lo_exact} > {hi_exact}")
    return Interval(lo, hi)


def point(value: RealLike) -> Interval:
    """Outward-rounded enclosure of a single real."""
    return round_outward(value, value)


def _bound(fn: Callable[..., object], args: Sequence[float], upward: bool) -> float:
    """Directed-rounded value of fn at float arguments."""
    if all(math.isfinite(a) for a in args):
        exact = fn(*(Fraction(a) for a in args))
        assert isinstance(exact, Fraction)
        return round_up(exact) if upward else round_down(exact)
    value = fn(*args)
    assert isinstance(value, float)
    if math.isnan(value):
        return INF if upward else -INF
    return value


def _corner_hull(fn: Callable[..., object], a: Interval, b: Interval) -> Interval:
    """Hull of fn over the four endpoint pairs (mul and div are monotone per quadrant)."""
    corners = [(x, y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
    lo = min(_bound(fn, pair, upward=False) for pair in corners)
    hi = max(_bound(fn, pair, upward=True) for pair in corners)
    return Interval(lo, hi)


# === Error-free transforms ===
# For moderate magnitudes the rounding error of a float sum or product is
# itself a float, so its sign says which way the rounded result moved.

_SPLITTER = 134217729.0  # 2**27 + 1
_FAST_MIN = 1e-100
_FAST_MAX = 1e100


def _directed(result: float, error: float, upward: bool) -> float:
    """Directed rounding of the exact value result + error."""
    if error == 0:
        return result
    if upward:
        return math.nextafter(result, INF) if error > 0 else result
    return math.nextafter(result, -INF) if error < 0 else result


def _sum_bound(a: float, b: float, upward: bool) -> float:
    s = a + b
    if not math.isfinite(s):
        return _bound(operator.add, (a, b), upward)
    bb = s - a
    error = (a - (s - bb)) + (b - bb)
    if not math.isfinite(error):
        return _bound(operator.add, (a, b), upward)
    return _directed(s, error, upward)


def _split(a: float) -> Tuple[float, float]:
    c = _SPLITTER * a
    high = c - (c - a)
    return high, a - high


def _product_bound(a: float, b: float, upward: bool) -> float:
    if not (_FAST_MIN < abs(a) < _FAST_MAX and _FAST_MIN < abs(b) < _FAST_MAX):
        return _bound(operator.mul, (a, b), upward)
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    error = al * bl - (((p - ah * bh) - al * bh) - ah * bl)
    return _directed(p, error, upward)


def _product_hull(a: Interval, b: Interval) -> Interval:
    corners = [(x, y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
    lo = min(_product_bound(x, y, upward=False) for x, y in corners)
    hi = max(_product_bound(x, y, upward=True) for x, y in corners)
    return Interval(lo, hi)


def _sqrt_down(x: float) -> float:
    if math.isinf(x):
        return x
    root = math.sqrt(x)
    if Fraction(root) ** 2 > Fraction(x):
        root = math.nextafter(root, -INF)
    return root


def _sqrt_up(x: float) -> float:
    if math.isinf(x):
        return x
    root = math.sqrt(x)
    if Fraction(root) ** 2 < Fraction(x):
        root = math.nextafter(root, INF)
    return root


def _power(a: Interval, k: int) -> Interval:
    def raise_to(x: object) -> object:
        return x ** k  # type: ignore[operator]

    if k % 2 == 1 or a.lo >= 0:
        return Interval(_bound(raise_to, (a.lo,), False), _bound(raise_to, (a.hi,), True))
    if a.hi <= 0:
        return Interval(_bound(raise_to, (a.hi,), False), _bound(raise_to, (a.lo,), True))
    # straddles zero: even powers bottom out at exactly 0
    return Interval(0.0, max(_bound(raise_to, (a.lo,), True), _bound(raise_to, (a.hi,), True)))


def _reciprocal(x: object) -> object:
    return 1 / x  # type: ignore[operator]


def extend(op: OpKind, args: Sequence[Interval], exponent: Optional[int] = None) -> Interval:
    """
    Natural interval extension of a single operator.

    Returns an outward-rounded enclosure of {f(x1..xk) : xi in args[i] ∩ dom f}.
    `exponent` is required for OpKind.POW and must be an integer >= 2.
    """
    if op.is_leaf:
        raise ValueError(f"{op.name} is a leaf operator and has no interval extension")
    if len(args) != op.arity:
        raise ValueError(f"{op.value} expects {op.arity} argument(s), got {len(args)}")

    if op is OpKind.ADD:
        a, b = args
        return Interval(_sum_bound(a.lo, b.lo, False), _sum_bound(a.hi, b.hi, True))
    if op is OpKind.SUB:
        a, b = args
        return Interval(_sum_bound(a.lo, -b.hi, False), _sum_bound(a.hi, -b.lo, True))
    if op is OpKind.MUL:
        return _product_hull(args[0], args[1])
    if op is OpKind.DIV:
        a, b = args
        if b.lo <= 0 <= b.hi:
            return TOP
        return _corner_hull(operator.truediv, a, b)
    if op is OpKind.NEG:
        (a,) = args
        return Interval(-a.hi, -a.lo)
    if op is OpKind.RECIP:
        (a,) = args
        if a.lo <= 0 <= a.hi:
            return TOP
        return Interval(_bound(_reciprocal, (a.hi,), False), _bound(_reciprocal, (a.lo,), True))
    if op is OpKind.SQ:
        return _power(args[0], 2)
    if op is OpKind.POW:
        if exponent is None or exponent < 2:
            raise ValueError(f"pow needs an integer exponent >= 2, got {exponent!r}")
        return _power(args[0], exponent)
    if op is OpKind.SQRT:
        (a,) = args
        if a.hi < 0:
            raise DomainError(f"sqrt of {a} is undefined everywhere")
        return Interval(_sqrt_down(max(a.lo, 0.0)), _sqrt_up(a.hi))

    raise ValueError(f"unsupported operator {op!r}")
