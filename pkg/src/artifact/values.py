"""Runtime values of MinErl."""
from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import Constant, Expr


class Value:
    __slots__ = ()


@dataclass(frozen=True)
class VConst(Value):
    value: Constant

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, eq=False)
class VClosure(Value):
    """A function value. Closures are compared by identity: two closures
    are never structurally equal."""
    param: str
    body: Expr
    env: object = field(repr=False)  # the letrec environment at the definition site

    def __str__(self):
        return f"<fun {self.param}>"


@dataclass(frozen=True)
class VPair(Value):
    left: Value
    right: Value

    def __str__(self):
        return show_value(self)


def show_value(v: Value) -> str:
    """Render a value, printing nil-terminated pair chains as lists."""
    if isinstance(v, VPair):
        items = []
        cur = v
        while isinstance(cur, VPair):
            items.append(cur.left)
            cur = cur.right
        if isinstance(cur, VConst) and cur.value == Constant("atom", "nil"):
            return "[" + ", ".join(show_value(x) for x in items) + "]"
        return "{" + show_value(v.left) + ", " + show_value(v.right) + "}"
    return str(v)


def values_equal(a: Value, b: Value) -> bool:
    """Structural equality used by repeated pattern variables."""
    if isinstance(a, VConst) and isinstance(b, VConst):
        return a.value == b.value
    if isinstance(a, VPair) and isinstance(b, VPair):
        return values_equal(a.left, b.left) and values_equal(a.right, b.right)
    return False
