"""
Expression AST for real-arithmetic terms.

Provides:
- Expr, an immutable tree over OpKind with exact rational constants
- parse / to_sexpr for the s-expression surface syntax
- eval_concrete (float), eval_precise (60-digit Decimal) and compile_concrete
- natural_extension, the structural-induction interval interpreter
- sample_range, an inner approximation of the true range by sampling
- parse_domain for `name=lo:hi` variable bindings
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from decimal import Decimal, DivisionByZero, InvalidOperation, localcontext
from fractions import Fraction
from typing import Callable, Dict, Iterator, Mapping, Optional, Tuple, Union

from shared.errors import ArityError, EvalError, ParseError
from shared.models.interval import INF, Interval, extend, point, round_outward
from shared.models.operators import OpKind
from shared.utils.sexpr import (
    Atom,
    SExp,
    SList,
    format_rational,
    is_identifier,
    parse_number,
    read,
)

DomainEnv = Mapping[str, Interval]
PointEnv = Mapping[str, float]
ConcreteFn = Callable[[PointEnv], float]

PRECISE_DIGITS = 60
# sampling stands in for unbounded domains with this magnitude
SAMPLE_CLAMP = 1e12


@dataclass(frozen=True)
class Expr:
    """
    Immutable expression node.

    `value` is set only for constants, `name` only for variables and
    `exponent` only for pow nodes.
    """
    op: OpKind
    children: Tuple["Expr", ...] = ()
    value: Optional[Fraction] = None
    name: Optional[str] = None
    exponent: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.children) != self.op.arity:
            raise ArityError(
                f"{self.op.value} expects {self.op.arity} operand(s), got {len(self.children)}"
            )
        if self.op is OpKind.CONST and not isinstance(self.value, Fraction):
            raise ValueError("constant expressions need an exact rational value")
        if self.op is OpKind.VAR and not self.name:
            raise ValueError("variable names must be non-empty")
        if self.op is OpKind.POW and (self.exponent is None or self.exponent < 2):
            raise ArityError(f"pow needs an integer exponent >= 2, got {self.exponent!r}")

    @classmethod
    def const(cls, value: Union[int, str, Fraction]) -> "Expr":
        return cls(OpKind.CONST, value=Fraction(value))

    @classmethod
    def var(cls, name: str) -> "Expr":
        return cls(OpKind.VAR, name=name)

    @classmethod
    def of(cls, op: OpKind, *children: "Expr") -> "Expr":
        return cls(op, tuple(children))

    @classmethod
    def pow(cls, base: "Expr", exponent: int) -> "Expr":
        if exponent == 2:
            return cls(OpKind.SQ, (base,))
        return cls(OpKind.POW, (base,), exponent=exponent)

    def __str__(self) -> str:
        return to_sexpr(self)

    def walk(self) -> Iterator["Expr"]:
        """Pre-order traversal."""
        yield self
        for child in self.children:
            yield from child.walk()


# === Printing and parsing ===

def to_sexpr(e: Expr) -> str:
    if e.op is OpKind.CONST:
        assert e.value is not None
        return format_rational(e.value)
    if e.op is OpKind.VAR:
        assert e.name is not None
        return e.name
    parts = [e.op.value, *(to_sexpr(c) for c in e.children)]
    if e.op is OpKind.POW:
        parts.append(str(e.exponent))
    return "(" + " ".join(parts) + ")"


def parse(text: str) -> Expr:
    """Parse an s-expression such as `(/ x (+ 1 y))` into an Expr."""
    return _build(read(text))


def _build(form: SExp) -> Expr:
    if isinstance(form, Atom):
        return _build_atom(form)
    return _build_list(form)


def _build_atom(atom: Atom) -> Expr:
    value = parse_number(atom.text)
    if value is not None:
        return Expr.const(value)
    if atom.text in _OPERATOR_TOKENS:
        raise ParseError(f"operator '{atom.text}' used as an operand", atom.position)
    if is_identifier(atom.text):
        return Expr.var(atom.text)
    raise ParseError(f"unrecognised atom '{atom.text}'", atom.position)


def _build_list(form: SList) -> Expr:
    if not form.items:
        raise ParseError("empty application '()'", form.position)
    head = form.items[0]
    if not isinstance(head, Atom) or head.text not in _OPERATOR_TOKENS:
        where = head.position
        raise ParseError("expected an operator at the head of an application", where)
    op = OpKind.from_token(head.text)
    operands = form.items[1:]

    if op is OpKind.POW:
        if len(operands) != 2:
            raise ArityError(f"pow expects a base and an exponent, got {len(operands)} operand(s)", form.position)
        exponent = operands[1]
        k = parse_number(exponent.text) if isinstance(exponent, Atom) else None
        if k is None or k.denominator != 1 or k < 2:
            raise ParseError("pow exponent must be an integer >= 2", exponent.position)
        return Expr.pow(_build(operands[0]), int(k))

    if len(operands) != op.arity:
        hint = " (unary minus is spelled 'neg')" if op is OpKind.SUB and len(operands) == 1 else ""
        raise ArityError(
            f"'{op.value}' expects {op.arity} operand(s), got {len(operands)}{hint}",
            form.position,
        )
    return Expr.of(op, *(_build(o) for o in operands))


_OPERATOR_TOKENS = frozenset(op.value for op in OpKind if not op.is_leaf)


# === Structural helpers ===

def variables(e: Expr) -> Tuple[str, ...]:
    return tuple(sorted({n.name for n in e.walk() if n.op is OpKind.VAR and n.name}))


def size(e: Expr) -> int:
    return sum(1 for _ in e.walk())


# === Concrete evaluation ===

def compile_concrete(e: Expr) -> ConcreteFn:
    """
    Compile an expression into a float evaluator.

    The returned callable raises EvalError on unbound variables, division by
    exactly zero, negative sqrt arguments and indeterminate (NaN) results.
    """
    op = e.op
    if op is OpKind.CONST:
        assert e.value is not None
        constant = float(e.value)
        return lambda env: constant
    if op is OpKind.VAR:
        name = e.name

        def lookup(env: PointEnv) -> float:
            try:
                return float(env[name])  # type: ignore[index]
            except KeyError:
                raise EvalError(f"unbound variable '{name}'") from None

        return lookup

    kids = [compile_concrete(c) for c in e.children]
    if op.arity == 1:
        (f,) = kids
        unary = _UNARY[op] if op is not OpKind.POW else _pow_fn(e.exponent or 2)
        return lambda env: _checked(unary(f(env)))
    f, g = kids
    binary = _BINARY[op]
    return lambda env: _checked(binary(f(env), g(env)))


def eval_concrete(e: Expr, env: PointEnv) -> float:
    return compile_concrete(e)(env)


def _checked(value: float) -> float:
    if math.isnan(value):
        raise EvalError("indeterminate result (NaN)")
    return value


def _div(a: float, b: float) -> float:
    if b == 0:
        raise EvalError("division by zero")
    return a / b


def _recip(a: float) -> float:
    if a == 0:
        raise EvalError("reciprocal of zero")
    return 1.0 / a


def _sqrt(a: float) -> float:
    if a < 0:
        raise EvalError(f"sqrt of negative value {a!r}")
    return math.sqrt(a)


def _pow_fn(k: int) -> Callable[[float], float]:
    def power(a: float) -> float:
        try:
            return a ** k
        except OverflowError:
            return INF if a > 0 or k % 2 == 0 else -INF

    return power


_UNARY: Dict[OpKind, Callable[[float], float]] = {
    OpKind.NEG: lambda a: -a,
    OpKind.RECIP: _recip,
    OpKind.SQRT: _sqrt,
    OpKind.SQ: lambda a: a * a,
}

_BINARY: Dict[OpKind, Callable[[float, float], float]] = {
    OpKind.ADD: lambda a, b: a + b,
    OpKind.SUB: lambda a, b: a - b,
    OpKind.MUL: lambda a, b: a * b,
    OpKind.DIV: _div,
}


def eval_precise(e: Expr, env: PointEnv, digits: int = PRECISE_DIGITS) -> Decimal:
    """Evaluate with `digits` significant decimal digits; float inputs are taken exactly."""
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.traps[DivisionByZero] = True
        ctx.traps[InvalidOperation] = True
        try:
            return _precise(e, env)
        except (DivisionByZero, InvalidOperation) as exc:
            raise EvalError(f"precise evaluation failed: {exc!r}") from exc


def _precise(e: Expr, env: PointEnv) -> Decimal:
    op = e.op
    if op is OpKind.CONST:
        assert e.value is not None
        return Decimal(e.value.numerator) / Decimal(e.value.denominator)
    if op is OpKind.VAR:
        if e.name not in env:
            raise EvalError(f"unbound variable '{e.name}'")
        return Decimal(float(env[e.name]))  # type: ignore[index]

    args = [_precise(c, env) for c in e.children]
    if op is OpKind.ADD:
        return args[0] + args[1]
    if op is OpKind.SUB:
        return args[0] - args[1]
    if op is OpKind.MUL:
        return args[0] * args[1]
    if op is OpKind.DIV:
        if args[1] == 0:
            raise EvalError("division by zero")
        return args[0] / args[1]
    if op is OpKind.NEG:
        return -args[0]
    if op is OpKind.RECIP:
        if args[0] == 0:
            raise EvalError("reciprocal of zero")
        return 1 / args[0]
    if op is OpKind.SQRT:
        if args[0] < 0:
            raise EvalError(f"sqrt of negative value {args[0]}")
        return args[0].sqrt()
    if op is OpKind.SQ:
        return args[0] * args[0]
    if op is OpKind.POW:
        return args[0] ** (e.exponent or 2)
    raise ValueError(f"unsupported operator {op!r}")


# === Interval semantics ===

def natural_extension(e: Expr, env: DomainEnv) -> Interval:
    """
    Interval of `e` by structural induction: every operator is replaced by its
    interval counterpart and each occurrence of a variable is bounded
    independently.
    """
    cache: Dict[Expr, Interval] = {}
    return _extend_cached(e, env, cache)


def _extend_cached(e: Expr, env: DomainEnv, cache: Dict[Expr, Interval]) -> Interval:
    hit = cache.get(e)
    if hit is not None:
        return hit
    if e.op is OpKind.CONST:
        assert e.value is not None
        result = point(e.value)
    elif e.op is OpKind.VAR:
        if e.name not in env:
            raise EvalError(f"no domain given for variable '{e.name}'")
        result = env[e.name]  # type: ignore[index]
    else:
        args = [_extend_cached(c, env, cache) for c in e.children]
        result = extend(e.op, args, e.exponent)
    cache[e] = result
    return result


def _axis(domain: Interval, n: int) -> list[float]:
    lo = max(domain.lo, -SAMPLE_CLAMP)
    hi = min(domain.hi, SAMPLE_CLAMP)
    if lo > hi:
        lo = hi = domain.lo if math.isfinite(domain.lo) else domain.hi
    if lo == hi:
        return [lo]
    step = (hi - lo) / (n - 1)
    values = [min(hi, lo + i * step) for i in range(n - 1)]
    values.append(hi)
    return values


def sample_range(
    e: Expr,
    env: DomainEnv,
    n: int,
    seed: int = 0,
    max_grid: int = 1_000_001,
) -> Interval:
    """
    Inner approximation of the range of `e`: [min, max] of concrete values
    over an n-point-per-axis grid plus n uniformly random points. Each point is
    evaluated with eval_precise and rounded to the nearest float, so a sampled
    value never lies outside a sound enclosure of the exact range.

    When the full grid would exceed `max_grid` points, only the corners and
    random points are used. Points where evaluation fails are skipped.
    """
    if n < 2:
        raise ValueError("sample_range needs at least 2 points per variable")
    names = variables(e)
    missing = [v for v in names if v not in env]
    if missing:
        raise EvalError(f"no domain given for variable(s) {', '.join(missing)}")

    def fn(point_env: PointEnv) -> float:
        return float(eval_precise(e, point_env))

    axes = [_axis(env[v], n) for v in names]
    if math.prod(len(a) for a in axes) <= max_grid:
        grid: Iterator[Tuple[float, ...]] = itertools.product(*axes)
    else:
        grid = itertools.product(*((a[0], a[-1]) for a in axes))
    rng = random.Random(seed)
    randoms = (tuple(rng.uniform(a[0], a[-1]) for a in axes) for _ in range(n))

    lo, hi = INF, -INF
    for values in itertools.chain(grid, randoms):
        try:
            v = fn(dict(zip(names, values)))
        except EvalError:
            continue
        lo = min(lo, v)
        hi = max(hi, v)
    if lo > hi:
        raise EvalError(f"every sample point of {to_sexpr(e)} failed to evaluate")
    return Interval(lo, hi)


# === Variable domains ===

def parse_domain(text: str) -> Tuple[str, Interval]:
    """Parse `name=lo:hi` (integer, decimal or p/q endpoints, or inf)."""
    name, sep, bounds = text.partition("=")
    name = name.strip()
    if not sep or not is_identifier(name):
        raise ParseError(f"expected NAME=LO:HI, got '{text}'")
    lo_text, sep, hi_text = bounds.partition(":")
    if not sep:
        raise ParseError(f"expected LO:HI bounds for '{name}', got '{bounds}'")
    lo = _endpoint(lo_text.strip(), text)
    hi = _endpoint(hi_text.strip(), text)
    if lo > hi:
        raise ParseError(f"empty domain for '{name}': {lo_text} > {hi_text}")
    return name, round_outward(lo, hi)


def _endpoint(token: str, text: str) -> Union[Fraction, float]:
    lowered = token.lower()
    if lowered in ("inf", "+inf"):
        return INF
    if lowered == "-inf":
        return -INF
    value = parse_number(token)
    if value is None:
        raise ParseError(f"bad interval endpoint '{token}' in '{text}'")
    return value
