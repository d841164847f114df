"""Typing of patterns and guards: pattern environments, pattern types,
potential and accepting types."""
from __future__ import annotations

from . import typecore as T
from .subtyping import const_type, is_empty, proj_left, proj_right
from .syntax import (And, Expr, Guard, GuardedPattern, Is, Pair, Pattern,
                     PConst, PPair, PVar, PWild, Var, bound_vars, guard_has_oracle, guard_vars)
from .typecore import Ty, TypeScheme


def mono(t: Ty) -> TypeScheme:
    return TypeScheme(frozenset(), t)


def _mono_body(s) -> Ty:
    if isinstance(s, TypeScheme):
        if s.quantified:
            raise ValueError("environment intersection needs monotypes")
        return s.body
    return s


def env_intersect(g1: dict, g2: dict) -> dict:
    """Pointwise intersection of two monotype environments."""
    out = dict(g1)
    for x, s in g2.items():
        if x in out:
            out[x] = mono(T.inter(_mono_body(out[x]), _mono_body(s)))
        else:
            out[x] = s
    return out


def guard_env(g: Guard) -> dict:
    if isinstance(g, Is):
        if not isinstance(g.subject, str):
            raise ValueError("source guards test variables only")
        return {g.subject: mono(T.base(g.base))}
    if isinstance(g, And):
        return env_intersect(guard_env(g.left), guard_env(g.right))
    return {}


def pat_env(t: Ty, p: Pattern) -> dict:
    if isinstance(p, (PConst, PWild)):
        return {}
    if isinstance(p, PVar):
        return {p.name: mono(t)}
    if isinstance(p, PPair):
        tp = T.inter(t, T.ANY_PAIR)
        if is_empty(tp):
            left = right = T.BOT
        else:
            left, right = proj_left(tp, strict=False), proj_right(tp, strict=False)
        return env_intersect(pat_env(left, p.left), pat_env(right, p.right))
    raise TypeError(f"not a pattern: {p!r}")


def gpat_env(t: Ty, pg: GuardedPattern) -> dict:
    return env_intersect(pat_env(t, pg.pattern), guard_env(pg.guard))


def pat_type(p: Pattern, env: dict) -> Ty:
    if isinstance(p, PConst):
        return const_type(p.value)
    if isinstance(p, PWild):
        return T.TOP
    if isinstance(p, PVar):
        s = env.get(p.name)
        return T.TOP if s is None else _mono_body(s)
    if isinstance(p, PPair):
        return T.prod(pat_type(p.left, env), pat_type(p.right, env))
    raise TypeError(f"not a pattern: {p!r}")


def pat_of_expr(e: Expr) -> Pattern:
    if isinstance(e, Var):
        return PVar(e.name)
    if isinstance(e, Pair):
        return PPair(pat_of_expr(e.left), pat_of_expr(e.right))
    return PWild()


def potential_type(pg: GuardedPattern, e: Expr) -> Ty:
    """A type every value matched by pg (as the value of e) belongs to."""
    genv = guard_env(pg.guard)
    return T.inter(pat_type(pg.pattern, genv), pat_type(pat_of_expr(e), genv))


def _pattern_vars_list(p: Pattern) -> list:
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, PPair):
        return _pattern_vars_list(p.left) + _pattern_vars_list(p.right)
    return []


def _has_float(p: Pattern) -> bool:
    if isinstance(p, PConst):
        return p.value.kind == "float"
    if isinstance(p, PPair):
        return _has_float(p.left) or _has_float(p.right)
    return False


def accepting_type(pg: GuardedPattern, e: Expr) -> Ty:
    """A type all of whose values are guaranteed to match pg.

    Bottom when the guard consults an oracle or tests a variable bound
    neither by the pattern nor by the scrutinee, and also when the pattern
    repeats a variable or contains a float literal (matching then depends on
    value equality, which no type captures)."""
    p, g = pg.pattern, pg.guard
    if guard_has_oracle(g):
        return T.BOT
    bound = bound_vars(p) | bound_vars(pat_of_expr(e))
    if not guard_vars(g) <= bound:
        return T.BOT
    names = _pattern_vars_list(p)
    if len(names) != len(set(names)) or _has_float(p):
        return T.BOT
    return potential_type(pg, e)

