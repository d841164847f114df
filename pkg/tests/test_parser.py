import pytest
from hypothesis import given, settings, strategies as st

from artifact import type_core as T
from artifact.checker import check_module
from artifact.parser import MAX_RANGE, ParseError, parse, parse_type, parse_type_file
from artifact.pretty import alpha_equal, module as show_module, modules_alpha_equivalent
from artifact.subtyping import equivalent
from artifact.syntax import Abs, Const, Pair, Var, atom_const, int_const

from conftest import CORPUS, ty

PARSEABLE = sorted(p.name for p in CORPUS.glob("*.mel") if p.name != "perfect.mel")


def n(i):
    return Const(int_const(i))


def test_list_declaration():
    m = parse("type ilist(a) = 'nil | {a, ilist(a)}; main : ilist(int) = [1];")
    assert equivalent(m.main_annotation.body, ty("list(int)"))


def test_tuple_sugar():
    assert parse("main = {1, 2, 3};").main == Pair(n(3), Pair(n(1), Pair(n(2), n(3))))
    assert parse("main = {1, 2};").main == Pair(n(1), n(2))
    assert equivalent(ty("{int, atom, float}"), ty("{3, {int, {atom, float}}}"))


def test_tuple_patterns_use_the_same_encoding():
    m = parse("def f : {1, 2, 3} -> 3 = fun t -> case t of {_, _, z} -> z end; main = f {1, 2, 3};")
    assert check_module(m) == []


def test_list_sugar():
    nil = Const(atom_const("nil"))
    assert parse("main = [];").main == nil
    assert parse("main = [1, 2];").main == Pair(n(1), Pair(n(2), nil))
    assert parse("main = [1 | 2];").main == Pair(n(1), n(2))


def test_multi_parameter_fun_curries():
    rhs = parse("def f = fun x y -> {x, y};").defs[0].rhs
    assert isinstance(rhs, Abs) and isinstance(rhs.body, Abs)
    assert rhs.body.body == Pair(Var(rhs.param), Var(rhs.body.param))


def test_ranges():
    assert equivalent(ty("1..3"), ty("1 | 2 | 3"))
    assert equivalent(ty("-1..1"), ty("-1 | 0 | 1"))
    with pytest.raises(ParseError):
        ty(f"0..{MAX_RANGE}")
    with pytest.raises(ParseError):
        ty("3..1")
    assert T.show(ty(f"0..{MAX_RANGE - 1}")).count("|") == MAX_RANGE - 1


def test_type_precedence():
    # | binds loosest, then &, then !, then ->
    assert ty("int | atom -> atom") is T.union(T.INT, T.arrow(T.ATOM, T.ATOM))
    assert ty("int & !1") is T.inter(T.INT, T.neg(T.sint(1)))
    assert ty("int -> int -> int") is T.arrow(T.INT, T.arrow(T.INT, T.INT))
    assert ty("pair") is T.ANY_PAIR and ty("fun") is T.ANY_FUN


def test_unbound_guard_subject_is_accepted_syntactically():
    parse("def f : int -> int = fun x -> case x of 1 when is int y -> 1; _ -> 2 end;")


@pytest.mark.parametrize("src, fragment", [
    ("main = {1};", "two components"),
    ("main = 1", "expected ';'"),
    ("def f = 1;", "must be a function"),
    ("def f : int -> int = fun x -> case x of 1 when is int 1 -> 1 end;", "variables only"),
    ("def f = fun x -> x; def f = fun y -> y;", "appears twice"),
    ("main = letrec f = fun x -> x; f = fun y -> y in f 1;", "distinct"),
    ("main = case 1 of end;", "expected a pattern"),
])
def test_parse_errors(src, fragment):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert fragment in str(info.value)
    assert info.value.loc.line >= 1


def test_declaration_errors_are_forwarded():
    with pytest.raises(T.NonRegular):
        parse("type perfect(a) = a | perfect({a, a});")
    with pytest.raises(T.NonContractive):
        parse("type t = !t;")
    with pytest.raises(T.UnknownName):
        parse("type t = nosuch(int);")


def test_alpha_renaming_makes_binders_unique():
    m = parse("def f = fun x -> case x of {x, y} -> fun x -> {x, y} end;")
    rhs = m.defs[0].rhs
    inner_pattern = rhs.body.clauses[0].guarded_pattern.pattern
    inner_fun = rhs.body.clauses[0].body
    names = [rhs.param, inner_pattern.left.name, inner_fun.param]
    assert len(set(names)) == 3


def test_parse_type_file():
    types = parse_type_file("type t = 1 | 2; type u = {t, t};")
    assert equivalent(parse_type("u", types), ty("{1 | 2, 1 | 2}"))
    with pytest.raises(ParseError):
        parse_type_file("main = 1;")


@pytest.mark.parametrize("name", PARSEABLE)
def test_round_trip(name):
    text = (CORPUS / name).read_text()
    m1 = parse(text, name)
    printed = show_module(m1)
    m2 = parse(printed, name)
    assert modules_alpha_equivalent(m1, m2)
    assert show_module(m2) == printed


def test_alpha_equal_distinguishes_structure():
    assert alpha_equal(Abs("x", Var("x")), Abs("y", Var("y")))
    assert not alpha_equal(Abs("x", Var("x")), Abs("y", Var("z")))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=6))
def test_tuple_literals_round_trip(xs):
    src = "main = {" + ", ".join(map(str, xs)) + "};"
    m = parse(src)
    assert modules_alpha_equivalent(m, parse(show_module(m)))
