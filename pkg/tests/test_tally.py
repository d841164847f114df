from hypothesis import given, settings, strategies as st

from artifact import type_core as T
from artifact.subtyping import equivalent, is_subtype
from artifact.tally import (SubtypeConstraint, constraint_sets, eliminate_equations, iter_tally,
                            satisfies, stats, tally)

from conftest import ty
from strategies import ground_types


def tv(t):
    return next(iter(T.free_tyvars(t)))


def sound(fixed, D, sols):
    for th in sols:
        assert not set(th) & set(fixed)
        assert satisfies(th, [SubtypeConstraint(*c) for c in D])


def test_upper_bound_is_solvable():
    a = T.fresh_var("a")
    D = [(a, T.INT)]
    sols = tally(frozenset(), D)
    assert sols
    sound((), D, sols)
    assert all(is_subtype(T.apply_subst(a, th), T.INT) for th in sols)


def test_disjoint_kinds_are_unsatisfiable():
    assert tally(frozenset(), [(T.INT, T.ATOM)]) == []


def test_fixed_variables_stay_out_of_the_domain():
    a = T.fresh_var("a")
    sols = tally({tv(a)}, [(a, a)])
    assert len(sols) == 1
    assert tv(a) not in sols[0]


def test_fixed_variable_cannot_be_refined():
    a = T.fresh_var("a")
    assert tally({tv(a)}, [(a, T.INT)]) == []
    assert tally(frozenset(), [(a, T.INT)]) != []


def test_arrow_application_shape():
    # (int -> 1) & (atom -> 'x) applied to an int: result var b must be >= 1
    f = ty("(int -> 1) & (atom -> 'x)")
    b = T.fresh_var("b")
    sols = tally(frozenset(), [(f, T.arrow(T.INT, b))])
    assert sols
    for th in sols:
        assert is_subtype(T.sint(1), T.apply_subst(b, th))


def test_recursive_solution():
    # a = {int, a} | 'nil is satisfied by list(int)
    a = T.fresh_var("a")
    D = [(T.union(T.satom("nil"), T.prod(T.INT, a)), a)]
    sols = tally(frozenset(), D)
    assert sols
    sound((), D, sols)


def test_equation_elimination():
    a = T.fresh_var("a")
    D = [SubtypeConstraint(a, T.INT), SubtypeConstraint(T.INT, a)]
    rest, pinned = eliminate_equations(frozenset(), D)
    assert pinned == [(tv(a), T.INT)]
    [th] = tally(frozenset(), D)
    assert equivalent(T.apply_subst(a, th), T.INT)


def test_existence_mode_agrees_on_satisfiability():
    a, b = T.fresh_var("a"), T.fresh_var("b")
    D = [(T.prod(a, b), T.prod(T.INT, T.ATOM)), (T.sint(1), a)]
    assert bool(list(iter_tally(frozenset(), D, existence=True))) == bool(tally(frozenset(), D))
    D2 = D + [(T.sint(2), b)]
    assert list(iter_tally(frozenset(), D2, existence=True)) == []


def test_deterministic():
    a, b = T.fresh_var("a"), T.fresh_var("b")
    D = [(T.union(a, b), T.union(T.INT, T.ATOM)), (T.sint(1), T.union(a, b))]
    def shown(sols):
        return [sorted((v.name, T.show(t)) for v, t in th.items()) for th in sols]
    assert shown(tally(frozenset(), D)) == shown(tally(frozenset(), D))


def test_stats_log_records_solutions():
    a = T.fresh_var("a")
    stats.log = []
    try:
        sols = tally(frozenset(), [(a, T.INT)])
        assert [th for _, _, th in stats.log] == sols
    finally:
        stats.log = None


def test_constraint_sets_of_ground_constraint():
    assert constraint_sets(frozenset(), [SubtypeConstraint(T.sint(1), T.INT)]) == [frozenset()]
    assert constraint_sets(frozenset(), [SubtypeConstraint(T.INT, T.sint(1))]) == []


@settings(max_examples=100, deadline=None)
@given(ground_types, ground_types, st.booleans())
def test_random_single_variable_problems_are_sound(lo, hi, swap):
    a = T.fresh_var("a")
    D = [(lo, a), (a, T.union(lo, hi))]
    if swap:
        D.append((T.prod(a, hi), T.prod(T.TOP, T.TOP)))
    sols = tally(frozenset(), D)
    assert sols  # a := lo always works
    sound((), D, sols)


@settings(max_examples=100, deadline=None)
@given(ground_types, ground_types)
def test_ground_problems_match_subtyping(s, t):
    assert bool(tally(frozenset(), [(s, t)])) == is_subtype(s, t)
