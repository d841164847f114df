import pytest
from hypothesis import given, settings, strategies as st

from artifact import type_core as T
from artifact.subtyping import (NotAPairType, base_subtype, diff, equivalent, is_empty, is_subtype,
                                proj_left, proj_right, simplify, value_singleton)
from artifact.syntax import Constant, Var
from artifact.values import VClosure, VConst, VPair

from conftest import ty
from strategies import VARS, ground_arrow_types, types


def test_base_subtype():
    assert base_subtype(T.BaseType("sint", 1), T.B_INT)
    assert base_subtype(T.BaseType("satom", "ok"), T.B_ATOM)
    assert not base_subtype(T.B_INT, T.B_FLOAT)
    assert not base_subtype(T.B_INT, T.BaseType("sint", 1))


def test_is_empty_examples():
    assert is_empty(T.BOT)
    assert is_empty(ty("int & atom"))
    assert is_empty(ty("list(a) & !('nil | pair)", {}))
    assert not is_empty(ty("list(a) & !'nil", {}))


def test_is_subtype_examples():
    env = {}
    assert is_subtype(ty("1 | 2"), T.INT)
    assert is_subtype(ty("{'true, b} | 'false", env), ty("'false | 'true | {'true, any}"))
    assert not is_subtype(T.INT, ty("1 | 2"))


def test_diff_examples():
    env = {}
    t = ty("'true | 'false | {'true, b}", env)
    assert equivalent(diff(t, T.BOT), t)
    assert is_empty(diff(t, t))
    assert equivalent(diff(t, ty("'false")), ty("'true | {'true, b}", env))


def test_projections():
    assert equivalent(proj_left(ty("{1, int}")), ty("1"))
    assert equivalent(proj_left(ty("{1, int} | {2, atom}")), ty("1 | 2"))
    assert equivalent(proj_right(ty("{1, int} | {2, atom}")), ty("int | atom"))
    assert proj_left(T.BOT) is T.BOT
    with pytest.raises(NotAPairType):
        proj_left(T.INT)


def test_projection_subtracts_negated_products():
    # {int, int} minus {1, int} still has every int but 1 on the left
    t = ty("{int, int} & !{1, int}")
    assert equivalent(proj_left(t), ty("int & !1"))
    assert equivalent(proj_right(t), T.INT)


def test_value_singleton():
    one = VConst(Constant("int", 1))
    assert value_singleton(one) is T.sint(1)
    assert value_singleton(VPair(VConst(Constant("atom", "ok")), VConst(Constant("int", 2)))) \
        is T.prod(T.satom("ok"), T.sint(2))
    assert value_singleton(VConst(Constant("float", 1.5))) is T.FLOAT
    assert value_singleton(VClosure("x", Var("x"), None)) is None


def test_recursive_types():
    env = {}
    assert is_subtype(ty("list(1)"), ty("list(int)"))
    assert not is_subtype(ty("list(int)"), ty("list(1)"))
    assert is_subtype(ty("list(a)", env), ty("list(a | b)", env))
    assert equivalent(ty("list(int)"), ty("'nil | {int, list(int)}"))


def test_variables_are_opaque():
    env = {}
    a = ty("a", env)
    assert is_subtype(a, a)
    assert not is_subtype(a, T.INT)
    assert not is_subtype(T.INT, a)
    assert is_subtype(T.inter(a, T.INT), a)
    assert is_subtype(a, T.union(a, T.INT))
    # a & !a is empty whatever a is
    assert is_empty(T.inter(a, T.neg(a)))
    # {a, int} <= {a, any}
    assert is_subtype(T.prod(a, T.INT), T.prod(a, T.TOP))


def test_arrow_laws():
    assert is_subtype(ty("int -> 1"), ty("1 -> int"))
    assert not is_subtype(ty("1 -> int"), ty("int -> int"))
    assert is_subtype(ty("(int -> int) & (atom -> atom)"), ty("(int | atom) -> (int | atom)"))
    assert not is_subtype(ty("(int | atom) -> (int | atom)"), ty("(int -> int) & (atom -> atom)"))
    # the codomain any does not make the domain irrelevant
    assert not is_subtype(ty("1 -> any"), ty("2 -> any"))
    assert not is_subtype(T.ANY_FUN, ty("int -> any"))
    assert is_subtype(ty("int -> int"), T.ANY_FUN)
    assert is_subtype(ty("none -> any"), T.ANY_FUN) and is_subtype(T.ANY_FUN, ty("none -> any"))


def test_simplify_preserves_meaning():
    t = ty("('nil | {int, list(int)}) & !float")
    s = simplify(t)
    assert equivalent(s, t)
    assert len(T.show(s)) <= len(T.show(t))


@settings(max_examples=200, deadline=None)
@given(types)
def test_reflexive_and_bounded(t):
    assert is_subtype(t, t)
    assert is_subtype(T.BOT, t)
    assert is_subtype(t, T.TOP)


@settings(max_examples=200, deadline=None)
@given(types, types, types)
def test_transitivity(s, t, u):
    if is_subtype(s, t) and is_subtype(t, u):
        assert is_subtype(s, u)


@settings(max_examples=200, deadline=None)
@given(types, types)
def test_boolean_algebra(s, t):
    assert equivalent(T.neg(T.neg(s)), s)
    assert equivalent(T.neg(T.union(s, t)), T.inter(T.neg(s), T.neg(t)))
    assert equivalent(T.neg(T.inter(s, t)), T.union(T.neg(s), T.neg(t)))
    assert is_empty(diff(s, T.union(s, t)))


@settings(max_examples=200, deadline=None)
@given(types, types, types)
def test_product_laws(a, b, c):
    assert equivalent(T.prod(T.union(a, b), c), T.union(T.prod(a, c), T.prod(b, c)))
    if is_subtype(a, b):
        assert is_subtype(T.prod(a, c), T.prod(b, c))


def _ground_instance(r, t):
    subst = {next(iter(T.free_tyvars(v))): r for v, r in zip(VARS, r)}
    return T.apply_subst(t, subst)


@settings(max_examples=100, deadline=None)
@given(types, types, st.lists(ground_arrow_types, min_size=3, max_size=3))
def test_ground_substitution_soundness(s, t, inst):
    if is_subtype(s, t):
        assert is_subtype(_ground_instance(inst, s), _ground_instance(inst, t))
