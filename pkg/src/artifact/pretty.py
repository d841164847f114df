"""Printing modules back to concrete syntax, and alpha-equivalence of modules.

The printer works on the desugared tree, so tuples and lists come out as
nested pairs; reparsing the output yields an alpha-equivalent module.
"""
from __future__ import annotations

import re

from . import typecore as T
from .subtyping import equivalent
from .syntax import (Abs, And, App, Case, Const, Constant, Definition, Expr, GTrue, Is, Letrec,
                     Module, Oracle, Pair, PConst, PPair, PVar, PWild, Var)
from .typecore import (TArrow, TBase, TBot, TInter, TName, TNeg, TProd, TTop, TUnion, TypeScheme)

_FLOAT_RE = re.compile(r"^\d+\.\d+$")


def constant(c: Constant) -> str:
    if c.kind == "atom":
        return "'" + c.payload
    if c.kind == "int":
        return str(c.payload)
    text = repr(abs(c.payload))
    if not _FLOAT_RE.match(text):
        text = f"{abs(c.payload):.17f}".rstrip("0")
        if text.endswith("."):
            text += "0"
    return ("-" if c.payload < 0 else "") + text


def texpr(te) -> str:
    if isinstance(te, TName):
        if not te.args:
            return te.name
        return f"{te.name}({', '.join(texpr(a) for a in te.args)})"
    if isinstance(te, TBase):
        return str(te.base)
    if isinstance(te, TTop):
        return "any"
    if isinstance(te, TBot):
        return "none"
    if isinstance(te, TArrow):
        return f"({texpr(te.dom)} -> {texpr(te.cod)})"
    if isinstance(te, TProd):
        return "{" + texpr(te.left) + ", " + texpr(te.right) + "}"
    if isinstance(te, TUnion):
        return "(" + " | ".join(texpr(a) for a in te.items) + ")"
    if isinstance(te, TInter):
        return "(" + " & ".join(texpr(a) for a in te.items) + ")"
    if isinstance(te, TNeg):
        return "!" + texpr(te.arg) if isinstance(te.arg, (TName, TBase, TTop, TBot)) \
            else "!(" + texpr(te.arg) + ")"
    raise TypeError(f"not a type expression: {te!r}")


def scheme(s: TypeScheme) -> str:
    if s.quantified:
        qs = " ".join(v.name for v in sorted(s.quantified))
        return f"forall {qs}. {T.show(s.body)}"
    return T.show(s.body)


def pattern(p) -> str:
    if isinstance(p, PWild):
        return "_"
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PConst):
        return constant(p.value)
    if isinstance(p, PPair):
        return "{" + pattern(p.left) + ", " + pattern(p.right) + "}"
    raise TypeError(f"not a pattern: {p!r}")


def guard(g) -> str:
    if isinstance(g, GTrue):
        return "true"
    if isinstance(g, Oracle):
        return "oracle"
    if isinstance(g, And):
        return f"({guard(g.left)} and {guard(g.right)})"
    if isinstance(g, Is):
        return f"is {g.base} {g.subject}"
    raise TypeError(f"not a guard: {g!r}")


def expr(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return constant(e.value)
    if isinstance(e, Abs):
        return f"(fun {e.param} -> {expr(e.body)})"
    if isinstance(e, App):
        return f"({expr(e.fn)} {expr(e.arg)})"
    if isinstance(e, Pair):
        return "{" + expr(e.left) + ", " + expr(e.right) + "}"
    if isinstance(e, Case):
        clauses = []
        for c in e.clauses:
            pg = c.guarded_pattern
            head = pattern(pg.pattern)
            if not isinstance(pg.guard, GTrue):
                head += " when " + guard(pg.guard)
            clauses.append(f"{head} -> {expr(c.body)}")
        return f"case {expr(e.scrutinee)} of " + "; ".join(clauses) + " end"
    if isinstance(e, Letrec):
        return "(letrec " + "; ".join(definition(d) for d in e.defs) + f" in {expr(e.body)})"
    raise TypeError(f"not an expression: {e!r}")


def definition(d: Definition) -> str:
    ann = f" : {scheme(d.annotation)}" if d.annotation is not None else ""
    return f"{d.name}{ann} = {expr(d.rhs)}"


def module(m: Module) -> str:
    lines = []
    for td in m.type_decls:
        params = f"({', '.join(td.params)})" if td.params else ""
        lines.append(f"type {td.name}{params} = {texpr(td.body)};")
    for d in m.defs:
        lines.append(f"def {definition(d)};")
    if m.main is not None:
        ann = f" : {T.show(m.main_annotation.body)}" if m.main_annotation is not None else ""
        lines.append(f"main{ann} = {expr(m.main)};")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ alpha-equivalence

def schemes_equivalent(s1, s2) -> bool:
    """Equal up to renaming of quantified variables (matched by name) and
    semantic equivalence of the bodies."""
    if (s1 is None) != (s2 is None):
        return False
    if s1 is None:
        return True
    q1 = {v.name: v for v in s1.quantified}
    q2 = {v.name: v for v in s2.quantified}
    if q1.keys() != q2.keys():
        return False
    free1 = {v.name: v for v in T.free_tyvars(s1)}
    free2 = {v.name: v for v in T.free_tyvars(s2)}
    if free1.keys() != free2.keys():
        return False
    theta = {q2[n]: T.var(q1[n]) for n in q2}
    theta.update({free2[n]: T.var(free1[n]) for n in free2})
    return equivalent(s1.body, T.apply_subst(s2.body, theta))


def _guard_eq(g1, g2, env) -> bool:
    if type(g1) is not type(g2):
        return False
    if isinstance(g1, Is):
        return g1.base == g2.base and env.get(g1.subject, g1.subject) == g2.subject
    if isinstance(g1, And):
        return _guard_eq(g1.left, g2.left, env) and _guard_eq(g1.right, g2.right, env)
    return True


def _pat_eq(p1, p2, env) -> bool:
    if type(p1) is not type(p2):
        return False
    if isinstance(p1, PVar):
        if p1.name in env:
            return env[p1.name] == p2.name
        if p2.name in env.values():
            return False
        env[p1.name] = p2.name
        return True
    if isinstance(p1, PConst):
        return p1.value == p2.value
    if isinstance(p1, PPair):
        return _pat_eq(p1.left, p2.left, env) and _pat_eq(p1.right, p2.right, env)
    return True


def alpha_equal(e1: Expr, e2: Expr, env=None) -> bool:
    env = env or {}
    if type(e1) is not type(e2):
        return False
    if isinstance(e1, Var):
        return env.get(e1.name, e1.name) == e2.name
    if isinstance(e1, Const):
        return e1.value == e2.value
    if isinstance(e1, Abs):
        return alpha_equal(e1.body, e2.body, {**env, e1.param: e2.param})
    if isinstance(e1, App):
        return alpha_equal(e1.fn, e2.fn, env) and alpha_equal(e1.arg, e2.arg, env)
    if isinstance(e1, Pair):
        return alpha_equal(e1.left, e2.left, env) and alpha_equal(e1.right, e2.right, env)
    if isinstance(e1, Case):
        if len(e1.clauses) != len(e2.clauses) or not alpha_equal(e1.scrutinee, e2.scrutinee, env):
            return False
        for c1, c2 in zip(e1.clauses, e2.clauses):
            bound: dict = {}
            if not _pat_eq(c1.guarded_pattern.pattern, c2.guarded_pattern.pattern, bound):
                return False
            inner = {**env, **bound}
            if not _guard_eq(c1.guarded_pattern.guard, c2.guarded_pattern.guard, inner):
                return False
            if not alpha_equal(c1.body, c2.body, inner):
                return False
        return True
    if isinstance(e1, Letrec):
        if len(e1.defs) != len(e2.defs):
            return False
        inner = {**env, **{d1.name: d2.name for d1, d2 in zip(e1.defs, e2.defs)}}
        for d1, d2 in zip(e1.defs, e2.defs):
            if not schemes_equivalent(d1.annotation, d2.annotation):
                return False
            if not alpha_equal(d1.rhs, d2.rhs, inner):
                return False
        return alpha_equal(e1.body, e2.body, inner)
    raise TypeError(f"not an expression: {e1!r}")


def modules_alpha_equivalent(m1: Module, m2: Module) -> bool:
    if [texpr(td.body) for td in m1.type_decls] != [texpr(td.body) for td in m2.type_decls]:
        return False
    if [(td.name, td.params) for td in m1.type_decls] != [(td.name, td.params) for td in m2.type_decls]:
        return False
    if [d.name for d in m1.defs] != [d.name for d in m2.defs]:
        return False
    for d1, d2 in zip(m1.defs, m2.defs):
        if not schemes_equivalent(d1.annotation, d2.annotation):
            return False
        if not alpha_equal(d1.rhs, d2.rhs):
            return False
    if (m1.main is None) != (m2.main is None):
        return False
    if m1.main is not None:
        if not schemes_equivalent(m1.main_annotation, m2.main_annotation):
            return False
        if not alpha_equal(m1.main, m2.main):
            return False
    return True
