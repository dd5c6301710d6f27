"""
Operator vocabulary shared by expressions, e-nodes and rule patterns.
"""

from enum import Enum


class OpKind(str, Enum):
    """Real-arithmetic operators; the value is the surface-syntax token."""
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    NEG = "neg"
    RECIP = "recip"
    SQRT = "sqrt"
    SQ = "sq"
    POW = "pow"  # integer exponent >= 2 carried as payload
    CONST = "const"
    VAR = "var"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def is_leaf(self) -> bool:
        return self in (OpKind.CONST, OpKind.VAR)

    @classmethod
    def from_token(cls, token: str) -> "OpKind":
        """Look up an operator by its surface token."""
        op = _BY_TOKEN.get(token)
        if op is None:
            raise KeyError(token)
        return op


_ARITY = {
    OpKind.ADD: 2,
    OpKind.SUB: 2,
    OpKind.MUL: 2,
    OpKind.DIV: 2,
    OpKind.NEG: 1,
    OpKind.RECIP: 1,
    OpKind.SQRT: 1,
    OpKind.SQ: 1,
    OpKind.POW: 1,
    OpKind.CONST: 0,
    OpKind.VAR: 0,
}

_BY_TOKEN = {op.value: op for op in OpKind if not op.is_leaf}
