"""Small-step call-by-value evaluation of MinErl.

Runtime expressions extend the source syntax with two nodes: `Val`, an
embedded value, and `Under`, which runs its body in an extended letrec
environment. Closures capture the environment in which their lambda was
evaluated, so letrec-bound names are resolved lazily and mutual recursion
needs no eager substitution.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Union

from .subtyping import base_subtype
from .syntax import (Abs, And, App, Case, Clause, Const, Definition, Expr, GTrue, GuardedPattern,
                     Is, Letrec, Module, Oracle, Pair, PConst, PPair, PVar, PWild, Var, bound_vars,
                     free_vars)
from .typecore import B_FLOAT, BaseType
from .values import VClosure, VConst, VPair, Value, values_equal


@dataclass(frozen=True)
class Val(Expr):
    value: Value

    def free_vars(self):
        return set()


@dataclass(frozen=True, eq=False)
class Under(Expr):
    env: "FunEnv"
    body: Expr

    def free_vars(self):
        return free_vars(self.body) - set(self.env.names())


class FunEnv:
    """Letrec environment: name -> definition, resolved to closures lazily."""

    def __init__(self, defs=(), parent: Optional["FunEnv"] = None):
        self.defs = {d.name: d.rhs for d in defs}
        self.parent = parent

    def lookup(self, name: str) -> Optional[Value]:
        env = self
        while env is not None:
            rhs = env.defs.get(name)
            if rhs is not None:
                return VClosure(rhs.param, rhs.body, env)
            env = env.parent
        return None

    def names(self):
        env, out = self, []
        while env is not None:
            out.extend(env.defs)
            env = env.parent
        return out


EMPTY_ENV = FunEnv()


class OracleSource:
    """A replayable stream of oracle outcomes."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)

    def draw(self) -> bool:
        return self._rng.random() < 0.5


@dataclass(frozen=True)
class Stuck:
    at: Expr


@dataclass(frozen=True)
class OutOfFuel:
    steps: int


class _StuckAt(Exception):
    def __init__(self, e: Expr):
        super().__init__("stuck")
        self.e = e


FAIL = None


# ------------------------------------------------------------------ matching

def value_matches_base(v: Value, b: BaseType) -> bool:
    if isinstance(v, VConst):
        c = v.value
        if c.kind == "int":
            own = BaseType("sint", c.payload)
        elif c.kind == "atom":
            own = BaseType("satom", c.payload)
        else:
            own = B_FLOAT
        return base_subtype(own, b)
    if isinstance(v, VPair):
        return b.kind == "pair"
    if isinstance(v, VClosure):
        return b.kind == "fun"
    return False


def _match_pattern(v: Value, p) -> Optional[dict]:
    if isinstance(p, PWild):
        return {}
    if isinstance(p, PVar):
        return {p.name: v}
    if isinstance(p, PConst):
        return {} if isinstance(v, VConst) and v.value == p.value else FAIL
    if isinstance(p, PPair):
        if not isinstance(v, VPair):
            return FAIL
        s1 = _match_pattern(v.left, p.left)
        if s1 is FAIL:
            return FAIL
        s2 = _match_pattern(v.right, p.right)
        if s2 is FAIL:
            return FAIL
        for x in s1.keys() & s2.keys():
            if not values_equal(s1[x], s2[x]):
                return FAIL
        return {**s2, **s1}
    raise TypeError(f"not a pattern: {p!r}")


def _guard_holds(g, subst: dict, env: FunEnv, oracle: OracleSource) -> bool:
    if isinstance(g, GTrue):
        return True
    if isinstance(g, Oracle):
        return oracle.draw()
    if isinstance(g, And):
        # both sides are evaluated so that every oracle occurrence draws once
        left = _guard_holds(g.left, subst, env, oracle)
        right = _guard_holds(g.right, subst, env, oracle)
        return left and right
    if isinstance(g, Is):
        subject = g.subject
        if isinstance(subject, Val):
            v = subject.value
        elif isinstance(subject, str):
            v = subst.get(subject)
            if v is None:
                v = env.lookup(subject)
        else:
            v = None
        # a test on a variable that is bound nowhere is false
        return v is not None and value_matches_base(v, g.base)
    raise TypeError(f"not a guard: {g!r}")


def match(v: Value, pg: GuardedPattern, oracle: Optional[OracleSource] = None,
          env: FunEnv = EMPTY_ENV) -> Optional[dict]:
    """The substitution for a successful match of v against pg, else None."""
    s = _match_pattern(v, pg.pattern)
    if s is FAIL:
        return FAIL
    if not _guard_holds(pg.guard, s, env, oracle or OracleSource()):
        return FAIL
    return s


# -------------------------------------------------------------- substitution

def substitute(e: Expr, s: dict) -> Expr:
    """Replace free variables by embedded values (values are closed, so no
    capture can occur)."""
    if not s:
        return e
    if isinstance(e, Var):
        v = s.get(e.name)
        return e if v is None else Val(v)
    if isinstance(e, (Const, Val)):
        return e
    if isinstance(e, Abs):
        inner = {k: v for k, v in s.items() if k != e.param}
        return Abs(e.param, substitute(e.body, inner))
    if isinstance(e, App):
        return App(substitute(e.fn, s), substitute(e.arg, s))
    if isinstance(e, Pair):
        return Pair(substitute(e.left, s), substitute(e.right, s))
    if isinstance(e, Case):
        clauses = []
        for c in e.clauses:
            inner = {k: v for k, v in s.items() if k not in bound_vars(c.guarded_pattern.pattern)}
            pg = GuardedPattern(c.guarded_pattern.pattern, _subst_guard(c.guarded_pattern.guard, inner))
            clauses.append(Clause(pg, substitute(c.body, inner), c.loc))
        return Case(substitute(e.scrutinee, s), tuple(clauses), e.loc)
    if isinstance(e, Letrec):
        names = {d.name for d in e.defs}
        inner = {k: v for k, v in s.items() if k not in names}
        defs = tuple(Definition(d.name, d.annotation, substitute(d.rhs, inner), d.loc) for d in e.defs)
        return Letrec(defs, substitute(e.body, inner))
    if isinstance(e, Under):
        inner = {k: v for k, v in s.items() if k not in e.env.defs}
        return Under(e.env, substitute(e.body, inner))
    raise TypeError(f"not an expression: {e!r}")


def _subst_guard(g, s):
    if isinstance(g, Is) and isinstance(g.subject, str) and g.subject in s:
        return Is(g.base, Val(s[g.subject]))
    if isinstance(g, And):
        return And(_subst_guard(g.left, s), _subst_guard(g.right, s))
    return g


# ------------------------------------------------------------------ stepping

def value_of(e: Expr) -> Optional[Value]:
    """The value of a fully evaluated expression (an embedded value or a
    literal constant), else None."""
    if isinstance(e, Val):
        return e.value
    if isinstance(e, Const):
        return VConst(e.value)
    return None


def is_value(e: Expr) -> bool:
    return isinstance(e, (Val, Const))


def step(env: FunEnv, e: Expr, oracle: Optional[OracleSource] = None):
    """One reduction step of e, or `Stuck` if no rule applies (values
    included)."""
    try:
        return _step(env, e, oracle or OracleSource())
    except _StuckAt as s:
        return Stuck(s.e)


def _step(env: FunEnv, e: Expr, oracle) -> Expr:
    if isinstance(e, (Val, Const)):
        raise _StuckAt(e)
    if isinstance(e, Var):
        v = env.lookup(e.name)
        if v is None:
            raise _StuckAt(e)
        return Val(v)
    if isinstance(e, Abs):
        return Val(VClosure(e.param, e.body, env))
    if isinstance(e, App):
        if not is_value(e.fn):
            return App(_step(env, e.fn, oracle), e.arg)
        if not is_value(e.arg):
            return App(e.fn, _step(env, e.arg, oracle))
        f = value_of(e.fn)
        if not isinstance(f, VClosure):
            raise _StuckAt(e)
        body = substitute(f.body, {f.param: value_of(e.arg)})
        return body if is_value(body) else Under(f.env, body)
    if isinstance(e, Pair):
        if not is_value(e.left):
            return Pair(_step(env, e.left, oracle), e.right)
        if not is_value(e.right):
            return Pair(e.left, _step(env, e.right, oracle))
        return Val(VPair(value_of(e.left), value_of(e.right)))
    if isinstance(e, Case):
        if not is_value(e.scrutinee):
            return Case(_step(env, e.scrutinee, oracle), e.clauses, e.loc)
        v = value_of(e.scrutinee)
        for c in e.clauses:
            s = match(v, c.guarded_pattern, oracle, env)
            if s is not FAIL:
                return substitute(c.body, s)
        raise _StuckAt(e)
    if isinstance(e, Letrec):
        return Under(FunEnv(e.defs, env), e.body)
    if isinstance(e, Under):
        if is_value(e.body):
            return e.body
        return Under(e.env, _step(e.env, e.body, oracle))
    raise TypeError(f"not an expression: {e!r}")


Result = Union[Value, Stuck, OutOfFuel]


def eval_expr(e: Expr, env: FunEnv = EMPTY_ENV, fuel: int = 1_000_000,
              oracle: Optional[OracleSource] = None) -> Result:
    oracle = oracle or OracleSource()
    n = 0
    while not is_value(e):
        if n >= fuel:
            return OutOfFuel(n)
        try:
            e = _step(env, e, oracle)
        except _StuckAt as s:
            return Stuck(s.e)
        n += 1
    return value_of(e)


def module_env(m: Module) -> FunEnv:
    return FunEnv(m.defs, None)


def eval_module(m: Module, fuel: int = 1_000_000, oracle: Optional[OracleSource] = None) -> Result:
    """Evaluate main under the module's definitions (a letrec around main)."""
    if m.main is None:
        raise ValueError("module has no main expression")
    from .checker import run_deep
    return run_deep(eval_expr, m.main, module_env(m), fuel, oracle or OracleSource())


# short public name
eval = eval_module  # noqa: A001
