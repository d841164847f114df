"""Solving sets of subtype constraints (tallying).

The solver works in three phases:

1. normalise: each constraint s ≤ t becomes the emptiness problem s ∧ ¬t ≤ 0,
   which is turned into a disjunction of constraint sets, each a conjunction
   of single-variable bounds;
2. saturate: for every variable with lower bound L and upper bound U the
   constraint L ≤ U is normalised again and merged in, until nothing new
   appears;
3. solve: bounds become equations (for instance α = L) which are resolved
   into a substitution, using recursive types when a variable depends on
   itself through a constructor.

Every substitution is checked against the original constraints before it is
returned, so the result is sound by construction.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

from . import dnf
from . import typecore as T
from .subtyping import equivalent, is_empty, is_subtype
from .typecore import Ty, TyVar

LOWER, UPPER = 0, 1
EMPTY = frozenset()

DEFAULT_CAP = 10_000
# saturation steps allowed per tally call, relative to the alternatives cap
STEP_FACTOR = 100

LEAST, MIXED, GENERAL = "least", "mixed", "general"
CASE_ORDER = (LEAST, MIXED, GENERAL)
LET_ORDER = (MIXED, GENERAL, LEAST)


class ResourceLimit(Exception):
    """Raised when the number of alternatives exceeds the configured cap."""


@dataclass(frozen=True)
class SubtypeConstraint:
    lower: Ty
    upper: Ty

    def __str__(self):
        return f"{T.show(self.lower)} <= {T.show(self.upper)}"


class _Stats(threading.local):
    def __init__(self):
        self.calls = 0
        self.rejected_candidates = 0
        # when set to a list, every (fixed, constraints, substitution) returned
        # is appended; used by tests to recheck soundness
        self.log = None


stats = _Stats()


# ----------------------------------------------------------- alternatives

def minimize(css: list) -> list:
    """Drop duplicate constraint sets and supersets of another alternative
    (a superset is a stronger requirement, so it adds no solutions)."""
    order = sorted(range(len(css)), key=lambda i: (len(css[i]), i))
    kept_idx = []
    kept = []
    for i in order:
        c = css[i]
        if any(k <= c for k in kept):
            continue
        kept.append(c)
        kept_idx.append(i)
    kept_idx.sort()
    return [css[i] for i in kept_idx]


class _Ctx:
    def __init__(self, fixed: frozenset, cap: int):
        self.fixed = fixed
        self.cap = cap
        self.steps = 0

    def check(self, n):
        if n > self.cap:
            raise ResourceLimit(f"more than {self.cap} constraint alternatives")

    def meet(self, a: list, b: list) -> list:
        if not a or not b:
            return []
        if a == [EMPTY]:
            return b
        if b == [EMPTY]:
            return a
        self.check(len(a) * len(b))
        return minimize([x | y for x in a for y in b])

    def join(self, a: list, b: list) -> list:
        if a == [EMPTY] or b == [EMPTY]:
            return [EMPTY]
        out = minimize(a + b)
        self.check(len(out))
        return out


_norm_cache: dict = {}


def _norm(ctx: _Ctx, t: Ty, memo: frozenset) -> list:
    """Alternatives under which t is empty."""
    if is_empty(t):
        return [EMPTY]
    if t in memo:
        return [EMPTY]
    top = not memo
    if top:
        key = (t, ctx.fixed)
        hit = _norm_cache.get(key)
        if hit is not None:
            return hit
    memo = memo | {t}
    result = [EMPTY]
    for (pv, nv), m in sorted(dnf.nf(t).items(), key=_entry_key):
        result = ctx.meet(result, _norm_entry(ctx, pv, nv, m, memo))
        if not result:
            break
    if top:
        _norm_cache[(t, ctx.fixed)] = result
    return result


def _entry_key(item):
    (pv, nv), _ = item
    return (sorted(v.id for v in pv), sorted(v.id for v in nv))


def _norm_entry(ctx: _Ctx, pv, nv, m: dnf.Mono, memo) -> list:
    free = [v for v in (pv | nv) if v not in ctx.fixed]
    if free:
        v = min(free)
        if v in pv:
            rest = dnf.entry_type(pv - {v}, nv, m)
            return [frozenset([(v, UPPER, T.neg(rest))])]
        rest = dnf.entry_type(pv, nv - {v}, m)
        return [frozenset([(v, LOWER, rest)])]
    if m.ints[0] or m.ints[1] or m.atoms[0] or m.atoms[1] or m.flt:
        return []
    result = [EMPTY]
    for l, r, negs in sorted(m.pairs, key=_line_key):
        result = ctx.meet(result, _norm_pair(ctx, l, r, sorted(negs, key=_pk), memo))
        if not result:
            return []
    for pos, negs in sorted(m.funs, key=_fun_key):
        result = ctx.meet(result, _norm_fun(ctx, pos, negs, memo))
        if not result:
            return []
    return result


def _pk(p):
    return (p[0].uid, p[1].uid)


def _line_key(line):
    return (line[0].uid, line[1].uid, sorted(_pk(p) for p in line[2]))


def _fun_key(line):
    return (sorted(_pk(p) for p in line[0]), sorted(_pk(p) for p in line[1]))


def _norm_pair(ctx, l, r, negs, memo) -> list:
    if not negs:
        return ctx.join(_norm(ctx, l, memo), _norm(ctx, r, memo))
    (nl, nr), rest = negs[0], negs[1:]
    l2 = T.diff(l, nl)
    a = [EMPTY] if is_empty(l2) else _norm_pair(ctx, l2, r, rest, memo)
    if not a:
        return []
    r2 = T.diff(r, nr)
    b = [EMPTY] if is_empty(r2) else _norm_pair(ctx, l, r2, rest, memo)
    return ctx.meet(a, b)


def _norm_fun(ctx, pos, negs, memo) -> list:
    ps = sorted(pos, key=_pk) or [(T.BOT, T.TOP)]
    result = []
    for d, c in sorted(negs, key=_pk):
        result = ctx.join(result, _norm_arrow(ctx, ps, 0, d, T.TOP, c, memo))
        if result == [EMPTY]:
            break
    return result


def _norm_arrow(ctx, ps, i, dom_left, cod_acc, c, memo) -> list:
    if is_empty(dom_left) or is_subtype(cod_acc, c):
        return [EMPTY]
    if i == len(ps):
        return ctx.join(_norm(ctx, dom_left, memo), _norm(ctx, T.diff(cod_acc, c), memo))
    pd, pc = ps[i]
    a = _norm_arrow(ctx, ps, i + 1, T.diff(dom_left, pd), cod_acc, c, memo)
    if not a:
        return []
    b = _norm_arrow(ctx, ps, i + 1, dom_left, T.inter(cod_acc, pc), c, memo)
    return ctx.meet(a, b)


# -------------------------------------------------------------- saturation

def bounds(cs: frozenset) -> dict:
    """var -> (lower bound, upper bound)."""
    lo: dict = {}
    up: dict = {}
    for v, kind, t in cs:
        (lo if kind == LOWER else up).setdefault(v, []).append(t)
    out = {}
    for v in set(lo) | set(up):
        out[v] = (T.union(*lo.get(v, ())), T.inter(*up.get(v, ())))
    return out


def _residues(cs) -> frozenset:
    return frozenset(T.diff(L, U) for L, U in bounds(cs).values())


def _saturate(ctx: _Ctx, cs: frozenset, done: frozenset) -> list:
    ctx.steps += 1
    if ctx.steps > ctx.cap * STEP_FACTOR:
        raise ResourceLimit(f"more than {ctx.cap * STEP_FACTOR} saturation steps")
    b = bounds(cs)
    for v in sorted(b):
        L, U = b[v]
        t = T.diff(L, U)
        if t in done:
            continue
        done = done | {t}
        if is_empty(t):
            continue
        alts = _norm(ctx, t, EMPTY)
        out = []
        for a in alts:
            out.extend(_saturate(ctx, cs if a <= cs else cs | a, done))
        out = minimize(out)
        ctx.check(len(out))
        return out
    return [cs]


# ----------------------------------------------------------------- solving

def _solve(cs: frozenset, strategy: str):
    eqs = {}
    for v, (L, U) in bounds(cs).items():
        if strategy == LEAST:
            rhs = L
        elif strategy == MIXED:
            if L is not T.BOT:
                rhs = L
            elif U is not T.TOP:
                rhs = T.inter(U, T.fresh_var(v.name))
            else:
                rhs = None
        else:
            if L is T.BOT and U is T.TOP:
                rhs = None
            else:
                rhs = T.inter(T.union(L, T.fresh_var(v.name)), U)
        if rhs is not None:
            eqs[v] = rhs
    sol: dict = {}
    for v in sorted(eqs, reverse=True):
        rhs = T.apply_subst(eqs[v], sol)
        if v in T.free_tyvars(rhs):
            if T.occurs_unguarded(v, rhs):
                return None
            r = T.rec()
            T.define_rec(r, T.apply_subst(rhs, {v: r}))
            val = r
        else:
            val = rhs
        sol = {w: T.apply_subst(x, {v: val}) for w, x in sol.items()}
        sol[v] = val
    return sol


def _same_solution(a: dict, b: dict) -> bool:
    if a.keys() != b.keys():
        return False
    return all(a[v] is b[v] or equivalent(a[v], b[v]) for v in a)


def satisfies(theta: dict, constraints) -> bool:
    return all(is_subtype(T.apply_subst(c.lower, theta), T.apply_subst(c.upper, theta))
               for c in constraints)


def _as_constraints(D) -> list:
    out = []
    seen = set()
    for c in D:
        if not isinstance(c, SubtypeConstraint):
            c = SubtypeConstraint(*c)
        key = (c.lower, c.upper)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


def constraint_sets(fixed, D, cap: int = DEFAULT_CAP) -> list:
    """The saturated alternatives for D (each a frozenset of bounds).

    Constraints with fewer alternatives are merged first: their bounds are
    then already present when a constraint with many alternatives (say, an
    intersection of arrows below an arrow) is split, and saturation discards
    the inconsistent choices right away."""
    ctx = _Ctx(frozenset(fixed), cap)
    css = [EMPTY]
    pending = []
    for i, c in enumerate(_as_constraints(D)):
        alts = _norm(ctx, T.diff(c.lower, c.upper), EMPTY)
        if alts == [EMPTY]:
            continue
        if not alts:
            return []
        pending.append((len(alts), i, alts))
    pending.sort(key=lambda x: (x[0], x[1]))
    for _, _, alts in pending:
        new = []
        for cs in css:
            done = _residues(cs)
            for a in alts:
                if a <= cs:
                    new.append(cs)
                else:
                    new.extend(_saturate(ctx, cs | a, done))
        css = minimize(new)
        ctx.check(len(css))
        if not css:
            return []
    return css


def eliminate_equations(fixed, D):
    """Remove variables pinned by a pair of constraints v <= X and X <= v.

    Every solution maps such a v to (something equivalent to) X, so v can be
    replaced by X everywhere. Returns the remaining constraints and the list
    of eliminated (v, X) in elimination order."""
    D = list(D)
    pinned = []
    while True:
        uppers = {}
        for c in D:
            if c.lower.tag == T.VAR and c.lower.args[0] not in fixed:
                uppers.setdefault((c.lower.args[0], c.upper), c)
        found = None
        for c in D:
            if c.upper.tag == T.VAR and c.upper.args[0] not in fixed:
                v = c.upper.args[0]
                if (v, c.lower) in uppers and v not in T.free_tyvars(c.lower):
                    found = (v, c.lower)
                    break
        if found is None:
            return D, pinned
        v, X = found
        sub = {v: X}
        pinned = [(w, T.apply_subst(t, sub)) for w, t in pinned] + [(v, X)]
        new = []
        for c in D:
            lo, up = T.apply_subst(c.lower, sub), T.apply_subst(c.upper, sub)
            if lo is up:
                continue
            new.append(SubtypeConstraint(lo, up))
        D = _as_constraints(new)


def _extend(theta: dict, pinned: list) -> dict:
    out = dict(theta)
    for v, X in reversed(pinned):
        out[v] = T.apply_subst(X, out)
    return out


POS, NEG = 1, 2


def _polarities(t: Ty, pol: int, acc: dict, seen: set):
    """Record, per variable, the polarities (POS/NEG bits) of its occurrences."""
    stack = [(t, pol)]
    while stack:
        n, p = stack.pop()
        if (n, p) in seen:
            continue
        seen.add((n, p))
        tag = n.tag
        if tag == T.VAR:
            acc[n.args[0]] = acc.get(n.args[0], 0) | p
        elif tag in (T.UNION, T.INTER):
            stack.extend((a, p) for a in n.args[0])
        elif tag == T.NEG:
            stack.append((n.args[0], POS + NEG - p))
        elif tag == T.ARROW:
            stack.append((n.args[0], POS + NEG - p))
            stack.append((n.args[1], p))
        elif tag == T.PROD:
            stack.extend((a, p) for a in n.args)
        elif tag == T.REC:
            stack.append((n.body, p))


def eliminate_polar(fixed, D):
    """Remove variables whose best value is forced by polarity.

    If no occurrence of v other than its lower bounds L <= v prefers a larger
    v (v is never negative on a left-hand side nor positive on a right-hand
    side), then v can be set to the union of its lower bounds; dually with
    upper bounds. Any solution can be turned into one of that shape, so
    satisfiability is preserved while the set of solutions shrinks: use it
    only when existence is all that matters."""
    D = list(D)
    pinned = []
    while True:
        lows: dict = {}
        ups: dict = {}
        smaller: set = set()   # some occurrence prefers a smaller value
        larger: set = set()    # some occurrence prefers a larger value
        for c in D:
            if c.lower.tag == T.VAR:
                ups.setdefault(c.lower.args[0], []).append(c.upper)
            else:
                acc: dict = {}
                _polarities(c.lower, POS, acc, set())
                for v, p in acc.items():
                    if p & POS:
                        smaller.add(v)
                    if p & NEG:
                        larger.add(v)
            if c.upper.tag == T.VAR:
                lows.setdefault(c.upper.args[0], []).append(c.lower)
            else:
                acc = {}
                _polarities(c.upper, POS, acc, set())
                for v, p in acc.items():
                    if p & POS:
                        larger.add(v)
                    if p & NEG:
                        smaller.add(v)
        found = None
        for v in sorted(set(lows) | set(ups) | smaller | larger):
            if v in fixed:
                continue
            if v not in larger:
                val = T.union(*lows.get(v, ()))
            elif v not in smaller:
                val = T.inter(*ups.get(v, ()))
            else:
                continue
            if v in T.free_tyvars(val):
                continue
            found = (v, val)
            break
        if found is None:
            return D, pinned
        v, X = found
        sub = {v: X}
        pinned = [(w, T.apply_subst(t, sub)) for w, t in pinned] + [(v, X)]
        new = []
        for c in D:
            lo, up = T.apply_subst(c.lower, sub), T.apply_subst(c.upper, sub)
            if lo is not up and lo is not T.BOT and up is not T.TOP:
                new.append(SubtypeConstraint(lo, up))
        D = _as_constraints(new)


def iter_tally(fixed, D, strategies=CASE_ORDER, cap: int = DEFAULT_CAP, existence: bool = False):
    """Lazily produce the substitutions of `tally`, in the same order.

    With existence=True the constraints are first simplified by polarity
    (see `eliminate_polar`): fewer solutions, but one exists iff one existed."""
    stats.calls += 1
    fixed = frozenset(fixed)
    D = _as_constraints(D)
    reduced, pinned = eliminate_equations(fixed, D)
    if existence:
        reduced, more = eliminate_polar(fixed, reduced)
        sub = dict(more)
        pinned = [(w, T.apply_subst(t, sub)) for w, t in pinned] + more
    out: list = []
    for cs in constraint_sets(fixed, reduced, cap):
        for strategy in strategies:
            theta = _solve(cs, strategy)
            if theta is None:
                continue
            theta = _extend(theta, pinned)
            if any(v in fixed for v in theta):
                continue
            if any(_same_solution(theta, old) for old in out[:50]):
                continue
            if not satisfies(theta, D):
                stats.rejected_candidates += 1
                continue
            out.append(theta)
            if stats.log is not None:
                stats.log.append((fixed, tuple(D), theta))
            yield theta


def tally(fixed, D, strategies=CASE_ORDER, cap: int = DEFAULT_CAP) -> list:
    """Substitutions θ with dom(θ) ∩ fixed = ∅ solving every constraint of D.

    D is an iterable of `SubtypeConstraint` or (lower, upper) pairs. The
    result is ordered deterministically: by alternative, then by strategy."""
    return list(iter_tally(fixed, D, strategies, cap))
