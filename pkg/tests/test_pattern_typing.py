import random

from hypothesis import given, settings

from artifact import type_core as T
from artifact.interpreter import match
from artifact.pattern_typing import (accepting_type, env_intersect, gpat_env, guard_env, mono,
                                     pat_env, pat_of_expr, pat_type, potential_type)
from artifact.subtyping import equivalent, is_empty, is_subtype, value_singleton
from artifact.syntax import (And, App, Const, Constant, GTrue, GuardedPattern, Is, Oracle, Pair,
                             PConst, PPair, PVar, PWild, Var)
from artifact.values import VConst, VPair

from conftest import ty
from strategies import ground_types


def one(n=1):
    return PConst(Constant("int", n))


def body(env, x):
    return env[x].body


XY = Pair(Var("x"), Var("y"))


def test_env_intersect():
    assert env_intersect({"x": mono(T.INT)}, {"y": mono(T.ATOM)}) == {"x": mono(T.INT), "y": mono(T.ATOM)}
    g = env_intersect({"x": mono(T.INT)}, {"x": mono(ty("1 | 2"))})
    assert equivalent(body(g, "x"), ty("1 | 2"))
    g2 = {"z": mono(T.FLOAT)}
    assert env_intersect({}, g2) == g2


def test_guard_env():
    assert guard_env(Is(T.B_INT, "z")) == {"z": mono(T.INT)}
    assert guard_env(Oracle()) == {}
    assert guard_env(GTrue()) == {}
    g = guard_env(And(Is(T.B_INT, "x"), Is(T.B_ATOM, "x")))
    assert is_empty(body(g, "x"))


def test_pat_env():
    assert pat_env(T.INT, PVar("x")) == {"x": mono(T.INT)}
    assert pat_env(T.INT, PWild()) == {}
    g = pat_env(ty("{1, int}"), PPair(PVar("a"), PVar("b")))
    assert equivalent(body(g, "a"), ty("1")) and equivalent(body(g, "b"), T.INT)


def test_pat_env_intersects_with_pairs_first():
    g = pat_env(ty("int | {1, atom}"), PPair(PVar("a"), PVar("b")))
    assert equivalent(body(g, "a"), ty("1")) and equivalent(body(g, "b"), T.ATOM)
    g = pat_env(T.INT, PPair(PVar("a"), PWild()))
    assert body(g, "a") is T.BOT


def test_gpat_env_adds_guard_types():
    pg = GuardedPattern(PVar("x"), Is(T.B_INT, "x"))
    assert equivalent(body(gpat_env(ty("1 | 'a"), pg), "x"), ty("1"))


def test_pat_type():
    assert pat_type(one(), {}) is T.sint(1)
    assert pat_type(PVar("z"), {"z": mono(T.INT)}) is T.INT
    assert pat_type(PVar("w"), {}) is T.TOP
    assert equivalent(pat_type(PPair(one(), PVar("z")), {"z": mono(T.INT)}), ty("{1, int}"))


def test_pat_of_expr():
    assert pat_of_expr(Var("x")) == PVar("x")
    assert pat_of_expr(XY) == PPair(PVar("x"), PVar("y"))
    assert pat_of_expr(App(Var("f"), Var("x"))) == PWild()


def test_potential_and_accepting_types():
    pg1 = GuardedPattern(PPair(one(), PVar("z")), Is(T.B_INT, "z"))
    assert equivalent(potential_type(pg1, XY), ty("{1, int}"))
    assert equivalent(accepting_type(pg1, XY), ty("{1, int}"))

    pg2 = GuardedPattern(PPair(one(), PWild()), Is(T.B_INT, "y"))
    assert equivalent(potential_type(pg2, XY), ty("{1, int}"))
    assert equivalent(accepting_type(pg2, XY), ty("{1, int}"))

    pg3 = GuardedPattern(PPair(one(), PWild()), And(Is(T.B_INT, "y"), Oracle()))
    assert equivalent(potential_type(pg3, XY), ty("{1, int}"))
    assert is_empty(accepting_type(pg3, XY))


def test_accepting_type_with_unbound_guard_subject():
    pg = GuardedPattern(PWild(), Is(T.B_INT, "w"))
    assert accepting_type(pg, XY) is T.BOT
    assert potential_type(GuardedPattern(PWild(), GTrue()), App(Var("f"), Var("x"))) is T.TOP


def test_accepting_type_of_nonlinear_pattern_is_empty():
    pg = GuardedPattern(PPair(PVar("x"), PVar("x")), GTrue())
    assert accepting_type(pg, Var("v")) is T.BOT
    assert equivalent(potential_type(pg, Var("v")), T.ANY_PAIR)


# ------------------------------------------------ agreement with matching

def _values(r, depth):
    if depth == 0 or r.random() < 0.4:
        return r.choice([VConst(Constant("int", i)) for i in range(3)]
                        + [VConst(Constant("atom", a)) for a in ("a", "b")])
    return VPair(_values(r, depth - 1), _values(r, depth - 1))


def _patterns(r, depth):
    k = r.random()
    if depth == 0 or k < 0.4:
        return r.choice([PWild(), PVar("x"), PVar("y"), one(0), one(1), PConst(Constant("atom", "a"))])
    return PPair(_patterns(r, depth - 1), _patterns(r, depth - 1))


def _guards(r):
    return r.choice([GTrue(), Is(T.B_INT, "x"), Is(T.B_ATOM, "y"),
                     And(Is(T.B_INT, "x"), Is(T.B_PAIR, "y")), Is(T.B_INT, "q")])


def test_matching_agrees_with_potential_and_accepting_types():
    r = random.Random(3)
    for _ in range(2000):
        v = _values(r, 3)
        pg = GuardedPattern(_patterns(r, 2), _guards(r))
        e = Var("scrut")
        sv = value_singleton(v)
        ok = match(v, pg) is not None
        if ok:
            assert is_subtype(sv, potential_type(pg, e)), (v, pg)
        if is_subtype(sv, accepting_type(pg, e)):
            assert ok, (v, pg)


@settings(max_examples=200, deadline=None)
@given(ground_types, ground_types, ground_types)
def test_env_intersect_commutative_and_associative(a, b, c):
    ga, gb, gc = ({"x": mono(t)} for t in (a, b, c))
    assert equivalent(body(env_intersect(ga, gb), "x"), body(env_intersect(gb, ga), "x"))
    left = env_intersect(env_intersect(ga, gb), gc)
    right = env_intersect(ga, env_intersect(gb, gc))
    assert equivalent(body(left, "x"), body(right, "x"))


@settings(max_examples=200, deadline=None)
@given(ground_types)
def test_accepting_below_potential(t):
    pg = GuardedPattern(PPair(PVar("x"), PWild()), Is(T.B_INT, "x"))
    for e in (Var("s"), XY, App(Var("f"), Var("s"))):
        assert is_subtype(accepting_type(pg, e), potential_type(pg, e))
    assert is_subtype(T.inter(t, accepting_type(pg, XY)), potential_type(pg, XY))
