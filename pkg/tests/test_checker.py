import json

import pytest

from artifact import type_core as T
from artifact.checker import (Diagnostic, UnknownDefinition, branch_report, check_module,
                              check_with_results)
from artifact.parser import parse
from artifact.subtyping import equivalent
from artifact.syntax import Loc

from conftest import load, ty

ACCEPTED = ["filtermap.mel", "ldom_coarse.mel", "ldom_precise.mel", "safe_div.mel",
            "safe_div_alt.mel", "ty.mel"]


def codes(src):
    return [(d.severity, d.code) for d in check_module(parse(src))]


def test_diagnostic_rendering():
    d = Diagnostic("error", "type-mismatch", Loc(3, 7), "f does not have type int -> int")
    assert d.render("a.mel") == "a.mel:3:7: error[type-mismatch]: f does not have type int -> int"
    assert json.loads(d.to_json("a.mel")) == {"severity": "error", "code": "type-mismatch",
                                              "file": "a.mel", "line": 3, "col": 7,
                                              "message": "f does not have type int -> int"}


@pytest.mark.parametrize("name", ACCEPTED)
def test_corpus_accepted(name):
    errors = [d for d in check_module(load(name)) if d.severity == "error"]
    assert errors == []


def test_tree_rejects_lookup_only():
    diags = check_module(load("tree.mel"))
    assert [(d.severity, d.code, d.loc.line) for d in diags] == [("error", "type-mismatch", 19)]
    assert "lookup" in diags[0].message


def test_case_with_single_branch_is_not_exhaustive():
    assert codes("def f : int -> int = fun x -> case x of 1 -> 1 end;") == [("error", "non-exhaustive")]


def test_oracle_guard_does_not_count_for_exhaustiveness():
    assert codes("def f : int -> int = fun x -> case x of y when oracle -> 1 end;") == \
        [("error", "non-exhaustive")]
    assert codes("def f : int -> int = fun x -> case x of y when oracle -> 1; _ -> 2 end;") == []


def test_annotation_errors():
    assert codes("def f : a -> a = fun x -> x;") == [("error", "open-annotation")]
    assert codes("def f : int = fun x -> x;") == [("error", "bad-annotation")]
    assert codes("def f : int -> int = fun x -> y;") == [("error", "unbound-variable")]
    assert codes("def f : int -> atom = fun x -> x;") == [("error", "type-mismatch")]


def test_intersection_checks_every_member():
    src = "def f : (int -> int) & (atom -> int) = fun x -> x;"
    diags = check_module(parse(src))
    assert len(diags) == 1 and "atom -> int" in diags[0].message


def test_unannotated_definitions_are_inferred():
    assert codes("def id = fun x -> x; main : {1, 'a} = {id 1, id 'a};") == []
    assert codes("def g = fun x -> case x of 1 -> 'a end; main = g 1;") == []
    assert codes("def g = fun x -> case x of 1 -> 'a end; main = g 2;") == [("error", "type-mismatch")]
    assert codes("def g = fun x -> case x of 1 -> 'a end;"
                 "def f : atom -> atom = fun x -> g x;") == [("error", "type-mismatch")]


def test_recursive_definitions():
    # an unannotated recursive function is consistent on its own; using it
    # at a list type needs an annotation (inferred types need not be principal)
    assert codes("def len = fun l -> case l of [] -> 0; [_ | t] -> len t end;") == []
    src = ("def len : forall a. [a] -> int = fun l -> case l of [] -> 0; [_ | t] -> len t end;"
           "main : int = len [1, 2];")
    assert codes(src) == []


def test_main_annotation_is_checked():
    assert codes("main : atom = 1;") == [("error", "type-mismatch")]
    assert codes("main : 1 | 'a = 1;") == []


def test_letrec():
    assert codes("def f : int -> int = fun x -> letrec h = fun y -> y in h x;") == []
    poly = ("def f : int -> {int, atom} = fun x ->"
            " letrec h : forall a. a -> a = fun y -> y in {h x, h 'a};")
    assert codes(poly) == []
    assert codes("def f : int -> int = fun x -> letrec h = fun y -> case y of 1 -> 1 end in h x;") \
        == [("error", "non-exhaustive")]


def test_dead_branch_warning():
    diags = check_module(load("ty.mel"))
    assert [(d.severity, d.code, d.loc.line) for d in diags] == [("warning", "dead-branch", 14)]


def test_no_warning_when_some_member_uses_the_branch():
    src = "def f : (1 -> 1) & (2 -> 2) = fun x -> case x of 1 -> 1; _ -> 2 end;"
    assert codes(src) == []


def test_branch_report_single_wildcard():
    m = parse("def f : (1 | 2) -> (1 | 2) = fun x -> case x of _ -> x end;")
    [(mr, [case])] = branch_report(m, "f")
    assert mr.ok
    [t] = case.inputs
    assert equivalent(t, ty("1 | 2"))


def test_branch_report_errors():
    m = parse("def f : int -> int = fun x -> x; def g = fun x -> x;")
    with pytest.raises(UnknownDefinition):
        branch_report(m, "nope")
    with pytest.raises(UnknownDefinition):
        branch_report(m, "g")


def test_results_expose_members():
    _, checker = check_with_results(load("safe_div.mel"))
    res = checker.results["safe_div"]
    assert res.ok and len(res.members) == 2
    assert all(mr.ok for mr in res.members)


def test_reordering_definitions_keeps_verdicts():
    defs = ["def find : int -> {int, int} -> bool = fun n p -> case p of {1, _} -> 'true; _ -> 'false end;",
            "def use : int -> bool = fun x -> find x {x, 1};",
            "def bad : int -> bool = fun x -> find 'a {x, 1};"]
    seen = set()
    for perm in (defs, defs[::-1], [defs[1], defs[2], defs[0]]):
        diags = check_module(parse("".join(perm)))
        seen.add(tuple(sorted(d.message.split()[0] for d in diags)))
    assert seen == {("bad",)}


def test_diagnostics_are_deterministic():
    first = [d.render("t.mel") for d in check_module(load("tree.mel"))]
    again = [d.render("t.mel") for d in check_module(load("tree.mel"))]
    assert first == again
