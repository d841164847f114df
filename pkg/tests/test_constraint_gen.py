import pytest

from artifact import type_core as T
from artifact.constraint_gen import (CaseC, DefC, FreshSource, OpenAnnotation, Sub, VarSub,
                                     equiv_constraints, gen_def, gen_expr, generalize,
                                     pat_env_constr, rewrite)
from artifact.parser import parse
from artifact.pattern_typing import mono
from artifact.syntax import Abs, Const, GTrue, GuardedPattern, PPair, PVar, PWild, Var, int_const
from artifact.tally import SubtypeConstraint
from artifact.type_core import TypeScheme

from conftest import deep, ty


def tv(t):
    return next(iter(T.free_tyvars(t)))


def test_gen_var_and_const():
    f = FreshSource()
    t = f()
    assert gen_expr(Var("x"), t, f) == (VarSub("x", t),)
    assert gen_expr(Const(int_const(1)), t, f) == (Sub(T.sint(1), t),)


def test_gen_abs():
    f = FreshSource()
    t = f()
    [d, s] = gen_expr(Abs("x", Var("x")), t, f)
    assert isinstance(d, DefC)
    [(x, sx)] = d.env.items()
    a = sx.body
    [vs] = d.body
    assert x == "x" and vs.name == "x"
    assert s == Sub(T.arrow(a, vs.upper), t)
    assert len({a, vs.upper, t}) == 3


def test_gen_case_records_branches_in_order():
    m = parse("def f : int -> int = fun x -> case x of 1 -> 1; _ -> 2 end;")
    f = FreshSource()
    [dc], _ = gen_def(m.defs[0], f)
    [case] = [c for c in dc.body if isinstance(c, CaseC)]
    assert len(case.branches) == 2
    assert T.show(case.branches[0].input) != T.show(case.branches[1].input)


def test_gen_def_annotated():
    m = parse("def id : forall a. a -> a = fun y -> y;"
              "def h : (int -> int) & (atom -> atom) = fun y -> y;"
              "def g = fun y -> y;")
    f = FreshSource()
    cs, env = gen_def(m.defs[0], f)
    assert len(cs) == 1 and env == {"id": m.defs[0].annotation}
    [(y, sy)] = cs[0].env.items()
    assert sy.body is T.var(next(iter(m.defs[0].annotation.quantified)))
    cs, env = gen_def(m.defs[1], f)
    assert len(cs) == 2 and all(isinstance(c, DefC) for c in cs)
    cs, env = gen_def(m.defs[2], f)
    assert set(env) == {"g"} and not env["g"].quantified


def test_gen_def_open_annotation():
    m = parse("def bad : a -> a = fun y -> y;")
    with pytest.raises(OpenAnnotation):
        gen_def(m.defs[0], FreshSource())


def test_pat_env_constr():
    f = FreshSource()
    t = f()
    assert pat_env_constr(t, PVar("x"), f) == ([], {"x": mono(t)})
    assert pat_env_constr(t, PWild(), f) == ([], {})
    cs, env = pat_env_constr(t, PPair(PVar("a"), PVar("b")), f)
    a1, a2 = env["a"].body, env["b"].body
    assert cs == [Sub(t, T.prod(a1, a2))]
    cs2, env2 = pat_env_constr(t, GuardedPattern(PVar("a"), GTrue()), f)
    assert env2 == {"a": mono(t)}


def test_rewrite_simple_and_var():
    f = FreshSource()
    s, t = T.INT, T.TOP
    assert [d for d, _ in rewrite({}, (Sub(s, t),), f)] == [(SubtypeConstraint(s, t),)]
    a = T.fresh_var("a")
    env = {"x": TypeScheme(frozenset([tv(a)]), T.arrow(a, a))}
    [(d, _)] = list(rewrite(env, (VarSub("x", T.arrow(T.INT, T.INT)),), f))
    [c] = d
    fresh_a = c.lower.args[0]
    assert c.upper is T.arrow(T.INT, T.INT)
    assert c.lower is T.arrow(fresh_a, fresh_a) and fresh_a is not a


def test_generalize_and_equiv():
    a = T.fresh_var("a")
    g = generalize({}, {"f": mono(T.arrow(a, a))})
    assert g["f"].quantified == {tv(a)}
    b = T.fresh_var("b")
    s = TypeScheme(frozenset([tv(b)]), T.arrow(b, a))
    assert generalize({"z": mono(a)}, {"f": s})["f"] is s
    assert generalize({"z": mono(a)}, {"f": mono(T.arrow(a, b))})["f"].quantified == {tv(b)}
    assert set(equiv_constraints({tv(a): T.INT})) == {SubtypeConstraint(a, T.INT),
                                                      SubtypeConstraint(T.INT, a)}


def test_rewrite_is_deterministic():
    src = "def f : int -> (1 | 2) = fun x -> case x of 1 -> 1; _ -> 2 end;"

    def candidates():
        m = parse(src)
        cs, env = gen_def(m.defs[0], FreshSource())
        return [[str(c) for c in d] for d, _ in rewrite(env, tuple(cs), FreshSource("r"))]

    assert deep(candidates) == deep(candidates)
