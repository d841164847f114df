"""Abstract syntax of MinErl: constants, expressions, patterns, guards, definitions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .typecore import BaseType, TypeScheme


@dataclass(frozen=True)
class Loc:
    """A source position (1-based line and column)."""
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


NOLOC = Loc(0, 0)


@dataclass(frozen=True)
class Constant:
    kind: str  # 'int' | 'float' | 'atom'
    payload: Union[int, float, str]

    def __post_init__(self):
        if self.kind not in ("int", "float", "atom"):
            raise ValueError(f"bad constant kind {self.kind!r}")
        if self.kind == "atom" and not self.payload:
            raise ValueError("atom names must be non-empty")

    @property
    def singleton_eligible(self) -> bool:
        return self.kind != "float"

    def __str__(self):
        if self.kind == "atom":
            return "'" + str(self.payload)
        return repr(self.payload)


def int_const(i: int) -> Constant:
    return Constant("int", i)


def atom_const(a: str) -> Constant:
    return Constant("atom", a)


# ---------------------------------------------------------------- expressions

class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Const(Expr):
    value: Constant


@dataclass(frozen=True)
class Abs(Expr):
    param: str
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Pair(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Case(Expr):
    scrutinee: Expr
    clauses: tuple
    loc: Loc = field(default=NOLOC, compare=False)

    def __post_init__(self):
        if not self.clauses:
            raise ValueError("case needs at least one clause")


@dataclass(frozen=True)
class Letrec(Expr):
    defs: tuple
    body: Expr

    def __post_init__(self):
        names = [d.name for d in self.defs]
        if len(set(names)) != len(names):
            raise ValueError("letrec names must be distinct")


# ------------------------------------------------------------------- patterns

class Pattern:
    __slots__ = ()


@dataclass(frozen=True)
class PConst(Pattern):
    value: Constant


@dataclass(frozen=True)
class PWild(Pattern):
    pass


@dataclass(frozen=True)
class PVar(Pattern):
    name: str


@dataclass(frozen=True)
class PPair(Pattern):
    left: Pattern
    right: Pattern


# --------------------------------------------------------------------- guards

class Guard:
    __slots__ = ()


@dataclass(frozen=True)
class Is(Guard):
    """Type test. In source programs the subject is a variable name; the
    interpreter also builds `Is` whose subject is an expression."""
    base: BaseType
    subject: Union[str, Expr]


@dataclass(frozen=True)
class And(Guard):
    left: Guard
    right: Guard


@dataclass(frozen=True)
class GTrue(Guard):
    pass


@dataclass(frozen=True)
class Oracle(Guard):
    pass


@dataclass(frozen=True)
class GuardedPattern:
    pattern: Pattern
    guard: Guard = GTrue()


@dataclass(frozen=True)
class Clause:
    guarded_pattern: GuardedPattern
    body: Expr
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Definition:
    name: str
    annotation: Optional[TypeScheme]
    rhs: Expr
    loc: Loc = field(default=NOLOC, compare=False)

    def __post_init__(self):
        if not isinstance(self.rhs, Abs):
            raise ValueError(f"definition {self.name} must bind an abstraction")


# ------------------------------------------------------------------- queries

def bound_vars(p: Pattern) -> set:
    """All variable names bound by a pattern."""
    out = set()
    stack = [p]
    while stack:
        q = stack.pop()
        if isinstance(q, PVar):
            out.add(q.name)
        elif isinstance(q, PPair):
            stack.append(q.left)
            stack.append(q.right)
    return out


def guard_vars(g: Guard) -> set:
    if isinstance(g, Is):
        return {g.subject} if isinstance(g.subject, str) else free_vars(g.subject)
    if isinstance(g, And):
        return guard_vars(g.left) | guard_vars(g.right)
    return set()


def guard_has_oracle(g: Guard) -> bool:
    if isinstance(g, Oracle):
        return True
    if isinstance(g, And):
        return guard_has_oracle(g.left) or guard_has_oracle(g.right)
    return False


def free_vars(e: Expr) -> set:
    """Expression variables of `e` not bound by an enclosing binder."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Abs):
        return free_vars(e.body) - {e.param}
    if isinstance(e, App):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, Pair):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Case):
        out = free_vars(e.scrutinee)
        for c in e.clauses:
            bound = bound_vars(c.guarded_pattern.pattern)
            out |= free_vars(c.body) - bound
        return out
    if isinstance(e, Letrec):
        names = {d.name for d in e.defs}
        out = free_vars(e.body)
        for d in e.defs:
            out |= free_vars(d.rhs)
        return out - names
    # runtime-only nodes (interpreter values) expose their own free variables
    fv = getattr(e, "free_vars", None)
    if fv is not None:
        return fv()
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True)
class Module:
    """A parsed program: type declarations, top-level definitions and an
    optional main expression (with an optional result annotation)."""
    type_decls: tuple
    defs: tuple
    main: Optional[Expr] = None
    main_annotation: Optional[TypeScheme] = None
    main_loc: Loc = field(default=NOLOC, compare=False)
    types: object = field(default=None, compare=False)
    path: str = field(default="<input>", compare=False)
