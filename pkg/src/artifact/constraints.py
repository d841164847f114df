"""Constraint generation and rewriting.

`gen_expr` turns an expression and an expected type into structured
constraints. `rewrite` turns structured constraints into candidate sets of
plain subtype constraints: case and letrec constraints are solved locally
with `tally`, and every choice of local solution is a backtracking point,
so `rewrite` yields candidates lazily in a fixed depth-first order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import typecore as T
from .patterns import accepting_type, env_intersect, guard_env, mono, pat_of_expr, potential_type
from .subtyping import const_type, is_empty
from .syntax import (Abs, App, Case, Const, Definition, Expr, GuardedPattern, Letrec, Loc,
                     NOLOC, Pair, Pattern, PConst, PPair, PVar, PWild, Var)
from .tally import CASE_ORDER, LET_ORDER, ResourceLimit, SubtypeConstraint, iter_tally
from .typecore import Ty, TypeScheme


class FreshSource:
    """Issues type variables that are new for the whole checker run."""

    def __init__(self, prefix: str = "t"):
        self.prefix = prefix
        self._n = itertools.count(1)

    def __call__(self, hint: Optional[str] = None) -> Ty:
        return T.fresh_var(f"{hint or self.prefix}{next(self._n)}")


class OpenAnnotation(Exception):
    def __init__(self, name, variables, loc=NOLOC):
        super().__init__(f"annotation of {name} has free type variables: "
                         + ", ".join(sorted(variables)))
        self.loc = loc


class UnboundVariable(Exception):
    def __init__(self, name):
        super().__init__(f"unbound variable {name}")
        self.name = name


# -------------------------------------------------------------- constraints

@dataclass(frozen=True)
class Sub:
    lower: Ty
    upper: Ty


@dataclass(frozen=True)
class VarSub:
    name: str
    upper: Ty


@dataclass(frozen=True, eq=False)
class DefC:
    env: dict
    body: tuple
    # set for the parameter of a lambda whose type is not known in advance:
    # its variable may then be refined by a local case or letrec solution
    flexible: bool = False


@dataclass(frozen=True, eq=False)
class Branch:
    env: dict
    body: tuple
    input: Ty


@dataclass(frozen=True, eq=False)
class CaseC:
    scrutinee: tuple
    branches: tuple
    case_id: int = 0
    result: Optional[Ty] = None
    loc: Loc = NOLOC
    clause_locs: tuple = ()
    # the first `split` scrutinee constraints come from the scrutinee
    # expression itself and are solved before the pattern constraints
    split: int = 0


@dataclass(frozen=True, eq=False)
class LetC:
    defs: tuple
    env: dict
    body: tuple
    rigid: frozenset = frozenset()


def _dedupe(cs) -> tuple:
    seen = set()
    out = []
    for c in cs:
        key = c if isinstance(c, (Sub, VarSub)) else id(c)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return tuple(out)


@dataclass
class GenOptions:
    """Knobs for constraint generation. `skip_exhaustive` lists case ids whose
    exhaustiveness constraint is left out (used to pinpoint failures)."""
    skip_exhaustive: frozenset = frozenset()
    case_counter: itertools.count = field(default_factory=lambda: itertools.count(1))
    cases: dict = field(default_factory=dict)


def gen_expr(e: Expr, t: Ty, fresh: FreshSource, opts: Optional[GenOptions] = None) -> tuple:
    """Structured constraints under which e has type t."""
    return _dedupe(_gen(e, t, fresh, opts or GenOptions()))


def _gen(e, t, fresh, opts) -> list:
    if isinstance(e, Var):
        return [VarSub(e.name, t)]
    if isinstance(e, Const):
        return [Sub(const_type(e.value), t)]
    if isinstance(e, Abs):
        arrows = _known_arrows(t)
        if arrows:
            # the expected type is a known arrow (or intersection of arrows):
            # check the body against each codomain directly
            return [DefC({e.param: mono(d)}, _dedupe(_gen(e.body, c, fresh, opts)))
                    for d, c in arrows]
        a, b = fresh(), fresh()
        return [DefC({e.param: mono(a)}, _dedupe(_gen(e.body, b, fresh, opts)), True),
                Sub(T.arrow(a, b), t)]
    if isinstance(e, App):
        a, b = fresh(), fresh()
        return _gen(e.fn, T.arrow(a, b), fresh, opts) + _gen(e.arg, a, fresh, opts) + [Sub(b, t)]
    if isinstance(e, Pair):
        a, b = fresh(), fresh()
        return _gen(e.left, a, fresh, opts) + _gen(e.right, b, fresh, opts) + [Sub(T.prod(a, b), t)]
    if isinstance(e, Case):
        return _gen_case(e, t, fresh, opts)
    if isinstance(e, Letrec):
        cs, env, rigid = [], {}, set()
        for d in e.defs:
            c, g = gen_def(d, fresh, opts)
            cs.extend(c)
            env.update(g)
            if d.annotation is not None:
                rigid |= d.annotation.quantified
        body = _dedupe(_gen(e.body, t, fresh, opts))
        return [LetC(_dedupe(cs), env, body, frozenset(rigid))]
    raise TypeError(f"not an expression: {e!r}")


def _known_arrows(t: Ty) -> list:
    if t.tag == T.ARROW:
        return [t.args]
    if t.tag == T.INTER and all(a.tag == T.ARROW for a in t.args[0]):
        return [a.args for a in sorted(t.args[0])]
    return []


def _gen_case(e: Case, t: Ty, fresh, opts) -> list:
    case_id = next(opts.case_counter)
    opts.cases[case_id] = e
    a, b = fresh(), fresh()
    head = _dedupe(_gen(e.scrutinee, a, fresh, opts))
    scrut = []
    pe = pat_of_expr(e.scrutinee)
    accepted = T.BOT
    branches = []
    for clause in e.clauses:
        pg = clause.guarded_pattern
        ti = T.inter(T.diff(a, accepted), potential_type(pg, e.scrutinee))
        c1, g1 = pat_env_constr(ti, GuardedPattern(pe), fresh)
        c2, g2 = pat_env_constr(ti, pg, fresh)
        scrut += c1 + c2
        body = _dedupe(_gen(clause.body, b, fresh, opts))
        branches.append(Branch(env_intersect(g1, g2), body, ti))
        accepted = T.union(accepted, accepting_type(pg, e.scrutinee))
    if case_id not in opts.skip_exhaustive:
        scrut.append(Sub(a, accepted))
    return [CaseC(head + _dedupe(scrut), tuple(branches), case_id, b, e.loc,
                  tuple(c.loc for c in e.clauses), len(head)),
            Sub(b, t)]


def pat_env_constr(t: Ty, pg, fresh: FreshSource):
    """Constraints and environment for matching a value of type t against
    a (guarded) pattern."""
    if isinstance(pg, GuardedPattern):
        cs, env = pat_env_constr(t, pg.pattern, fresh)
        return cs, env_intersect(env, guard_env(pg.guard))
    p: Pattern = pg
    if isinstance(p, (PConst, PWild)):
        return [], {}
    if isinstance(p, PVar):
        return [], {p.name: mono(t)}
    if isinstance(p, PPair):
        a1, a2 = fresh(), fresh()
        c1, g1 = pat_env_constr(a1, p.left, fresh)
        c2, g2 = pat_env_constr(a2, p.right, fresh)
        return c1 + c2 + [Sub(t, T.prod(a1, a2))], env_intersect(g1, g2)
    raise TypeError(f"not a pattern: {p!r}")


def annotation_arrows(s: TypeScheme) -> Optional[list]:
    """The members t'_i -> t_i of a scheme ∀A.⋀(t'_i -> t_i), or None if the
    body does not have that shape."""
    arrows = _known_arrows(s.body)
    return arrows or None


def gen_def(d: Definition, fresh: FreshSource, opts: Optional[GenOptions] = None):
    """(constraints, environment) for a definition x = λy.e."""
    opts = opts or GenOptions()
    if d.annotation is not None:
        s = d.annotation
        if T.free_tyvars(s):
            raise OpenAnnotation(d.name, {v.name for v in T.free_tyvars(s)}, d.loc)
        arrows = annotation_arrows(s)
        if arrows is None:
            raise ValueError(f"annotation of {d.name} is not an intersection of arrows")
        cs = [DefC({d.rhs.param: mono(dom)}, _dedupe(_gen(d.rhs.body, cod, fresh, opts)))
              for dom, cod in arrows]
        return cs, {d.name: s}
    a = fresh()
    return _gen(d.rhs, a, fresh, opts), {d.name: mono(a)}


# ----------------------------------------------------------------- rewriting

def generalize(env: dict, new: dict) -> dict:
    """Quantify the variables of each monotype binding that do not occur in env."""
    env_vars = T.free_tyvars(env)
    out = {}
    for x, s in new.items():
        if s.quantified:
            out[x] = s
        else:
            out[x] = TypeScheme(frozenset(T.free_tyvars(s.body) - env_vars), s.body)
    return out


def equiv_constraints(theta: dict) -> tuple:
    out = []
    for v in sorted(theta):
        tv = T.var(v)
        out.append(SubtypeConstraint(tv, theta[v]))
        out.append(SubtypeConstraint(theta[v], tv))
    return tuple(out)


def subst_env(env: dict, theta: dict) -> dict:
    return {x: TypeScheme(s.quantified, T.apply_subst(s.body, theta)) for x, s in env.items()}


@dataclass(frozen=True)
class CaseRecord:
    """What happened at one case constraint along a candidate: the branch
    input types under the chosen local solution, and the result variable."""
    case_id: int
    inputs: tuple
    live: tuple
    result: Ty
    loc: Loc = NOLOC


class _Rewriter:
    def __init__(self, fresh: FreshSource, cap: int):
        self.fresh = fresh
        self.cap = cap
        self.explored = 0
        # parameter variables of lambdas with inferred types; local solutions
        # may instantiate them (Equiv then pins the choice for the caller)
        self.flexible: set = set()

    def instantiate(self, s: TypeScheme) -> Ty:
        if not s.quantified:
            return s.body
        theta = {v: self.fresh(v.name) for v in sorted(s.quantified)}
        return T.apply_subst(s.body, theta)

    def many(self, env: dict, cs: tuple, i: int = 0):
        if i == len(cs):
            yield (), ()
            return
        for d1, r1 in self.one(env, cs[i]):
            for d2, r2 in self.many(env, cs, i + 1):
                yield d1 + d2, r1 + r2

    def one(self, env: dict, c):
        if isinstance(c, Sub):
            yield (SubtypeConstraint(c.lower, c.upper),), ()
        elif isinstance(c, VarSub):
            s = env.get(c.name)
            if s is None:
                raise UnboundVariable(c.name)
            yield (SubtypeConstraint(self.instantiate(s), c.upper),), ()
        elif isinstance(c, DefC):
            inner = dict(env)
            inner.update(c.env)
            if c.flexible:
                self.flexible |= T.free_tyvars(c.env)
            yield from self.many(inner, c.body)
        elif isinstance(c, CaseC):
            yield from self.case(env, c)
        elif isinstance(c, LetC):
            yield from self.let(env, c)
        else:
            raise TypeError(f"not a constraint: {c!r}")

    def _scrutinee_solutions(self, env, c: CaseC, fixed):
        """Solutions of the scrutinee constraints, in two stages: first the
        constraints of the scrutinee expression, then (under each of those
        solutions) the pattern and exhaustiveness constraints. Solving them
        together gives the same solutions but splits into exponentially many
        alternatives on nested pair patterns."""
        head, tail = c.scrutinee[:c.split], c.scrutinee[c.split:]
        order = self._order(env)
        for ds1, rs in self.many(env, head):
            for th1 in iter_tally(fixed, ds1, order):
                self._tick()
                for ds2, _ in self.many(env, tail):
                    d2 = [SubtypeConstraint(T.apply_subst(x.lower, th1), T.apply_subst(x.upper, th1))
                          for x in ds2]
                    for th2 in iter_tally(fixed, d2, order):
                        theta = {v: T.apply_subst(t, th2) for v, t in th1.items()}
                        for v, t in th2.items():
                            theta.setdefault(v, t)
                        yield theta, rs

    def _order(self, env):
        """Least solutions first, unless the case refines the parameter of a
        lambda being inferred: a least choice would shrink its type to
        nothing, so general solutions come first there."""
        if T.free_tyvars(env) & self.flexible:
            return LET_ORDER
        return CASE_ORDER

    def case(self, env: dict, c: CaseC):
        fixed = T.free_tyvars(env) - self.flexible
        for theta, rs in self._scrutinee_solutions(env, c, fixed):
            self._tick()
            inputs, live = [], []
            for br in c.branches:
                ti = T.apply_subst(br.input, theta)
                inputs.append(ti)
                live.append(not is_empty(ti))
            record = CaseRecord(c.case_id, tuple(inputs), tuple(live), c.result, c.loc)
            live_branches = [br for br, ok in zip(c.branches, live) if ok]
            for d, r in self._branches(env, live_branches, theta):
                yield equiv_constraints(theta) + d, rs + (record,) + r

    def _branches(self, env, branches, theta, i=0):
        if i == len(branches):
            yield (), ()
            return
        br = branches[i]
        inner = dict(env)
        inner.update(subst_env(br.env, theta))
        for d1, r1 in self.many(inner, br.body):
            for d2, r2 in self._branches(env, branches, theta, i + 1):
                yield d1 + d2, r1 + r2

    def let(self, env: dict, c: LetC):
        inner = dict(env)
        inner.update(c.env)
        for ds, rs in self.many(inner, c.defs):
            fixed = (T.free_tyvars(env) - self.flexible) | c.rigid
            for theta in iter_tally(fixed, ds, LET_ORDER):
                self._tick()
                outer = subst_env(env, theta)
                body_env = dict(outer)
                body_env.update(generalize(outer, subst_env(c.env, theta)))
                for d, r in self.many(body_env, c.body):
                    yield equiv_constraints(theta) + d, rs + r

    def _tick(self):
        self.explored += 1
        if self.explored > self.cap:
            raise ResourceLimit(f"more than {self.cap} local solutions explored")


def rewrite(env: dict, cs: tuple, fresh: FreshSource, cap: int = 1000):
    """Yield candidate (simple constraints, case records) pairs, lazily, in
    depth-first order over the local solutions chosen at case and letrec
    constraints."""
    rw = _Rewriter(fresh, cap)
    for d, records in rw.many(env, tuple(cs)):
        seen = set()
        out = []
        for c in d:
            if c not in seen:
                seen.add(c)
                out.append(c)
        yield tuple(out), records
