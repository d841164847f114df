"""Emptiness and subtyping of set-theoretic types.

`is_empty` decides whether a type denotes the empty set under every
assignment of its variables. Each normal-form line is checked kind by
kind; top-level variables are dropped (a positive variable may be taken
large and a negative one small), products and arrows are decomposed in
the classical way, and revisited nodes are assumed empty (coinduction).
"""
from __future__ import annotations

import sys
import threading

from . import dnf
from . import typecore as T
from .typecore import Ty
from .values import VClosure, VConst, VPair, Value

sys.setrecursionlimit(max(sys.getrecursionlimit(), 60000))


class NotAPairType(Exception):
    pass


def base_subtype(b1: T.BaseType, b2: T.BaseType) -> bool:
    if b1 == b2:
        return True
    if b1.kind == "sint" and b2.kind == "int":
        return True
    if b1.kind == "satom" and b2.kind == "atom":
        return True
    return False


# Proven results. Both are stable: a type's denotation never changes.
_cache: dict = {}


class _Query(threading.local):
    def __init__(self):
        self.assumed = set()
        self.tentative = []
        self.depth = 0


_q = _Query()


def is_empty(t: Ty) -> bool:
    """Is t empty for every assignment of its type variables?"""
    if t is T.BOT:
        return True
    r = _cache.get(t)
    if r is not None:
        return r
    q = _q
    if t in q.assumed:
        return True
    q.assumed.add(t)
    mark = len(q.tentative)
    q.depth += 1
    try:
        res = _nf_empty(dnf.nf(t))
    finally:
        q.depth -= 1
        q.assumed.discard(t)
    if res:
        q.tentative.append(t)
    else:
        # results derived after assuming t empty are unreliable
        del q.tentative[mark:]
        _cache[t] = False
    if q.depth == 0:
        for s in q.tentative:
            _cache[s] = True
        q.tentative.clear()
    return res


def _nf_empty(nf: dict) -> bool:
    for m in nf.values():
        if not mono_empty(m):
            return False
    return True


def mono_empty(m: dnf.Mono) -> bool:
    if m.ints[0] or m.ints[1] or m.atoms[0] or m.atoms[1] or m.flt:
        return False
    for l, r, negs in m.pairs:
        if not pair_line_empty(l, r, sorted(negs, key=_pair_key)):
            return False
    for pos, negs in m.funs:
        if not fun_line_empty(pos, negs):
            return False
    return True


def _pair_key(p):
    return (p[0].uid, p[1].uid)


def pair_line_empty(l: Ty, r: Ty, negs: list) -> bool:
    """Is {l, r} minus the union of the products in negs empty?"""
    if is_empty(l) or is_empty(r):
        return True
    if not negs:
        return False
    (nl, nr), rest = negs[0], negs[1:]
    l2 = T.diff(l, nl)
    if not (is_empty(l2) or pair_line_empty(l2, r, rest)):
        return False
    r2 = T.diff(r, nr)
    return is_empty(r2) or pair_line_empty(l, r2, rest)


_ANYFUN_ARROWS = ((T.BOT, T.TOP),)


def fun_line_empty(pos, negs) -> bool:
    ps = sorted(pos, key=_pair_key) or list(_ANYFUN_ARROWS)
    for d, c in sorted(negs, key=_pair_key):
        if arrows_below(ps, d, c):
            return True
    return False


def arrows_below(ps: list, d: Ty, c: Ty) -> bool:
    """Is the intersection of the arrows ps a subtype of d -> c?

    Holds iff for every subset P of ps, d ≤ ⋁ dom(P), or P is a proper
    subset and ⋀ cod(ps∖P) ≤ c. With P = ps only the first disjunct is
    available, so d must be covered by the domains."""
    def explore(i, dom_left, cod_acc, cod_used):
        if is_empty(dom_left) or (cod_used and is_subtype(cod_acc, c)):
            return True
        if i == len(ps):
            return False
        pd, pc = ps[i]
        return (explore(i + 1, T.diff(dom_left, pd), cod_acc, cod_used)
                and explore(i + 1, dom_left, T.inter(cod_acc, pc), True))

    return explore(0, d, T.TOP, False)


def is_subtype(s: Ty, t: Ty) -> bool:
    if s is t or s is T.BOT or t is T.TOP:
        return True
    return is_empty(T.diff(s, t))


def equivalent(s: Ty, t: Ty) -> bool:
    return is_subtype(s, t) and is_subtype(t, s)


def diff(s: Ty, t: Ty) -> Ty:
    return T.diff(s, t)


def _rectangles(l, r, negs):
    """Split {l,r} ∖ ⋃negs into a union of rectangles (left, right)."""
    out = []

    def go(i, a, b):
        if is_empty(a) or is_empty(b):
            return
        if i == len(negs):
            out.append((a, b))
            return
        nl, nr = negs[i]
        go(i + 1, T.diff(a, nl), b)
        go(i + 1, T.inter(a, nl), T.diff(b, nr))

    go(0, l, r)
    return out


def _proj(t: Ty, side: int, strict: bool) -> Ty:
    if strict and not is_subtype(t, T.ANY_PAIR):
        raise NotAPairType(T.show(t))
    parts = []
    for m in dnf.nf(T.inter(t, T.ANY_PAIR)).values():
        for l, r, negs in m.pairs:
            for a, b in _rectangles(l, r, sorted(negs, key=_pair_key)):
                parts.append(b if side else a)
    return T.union(*parts)


def proj_left(t: Ty, strict: bool = True) -> Ty:
    """Least s with t ≤ {s, any}. With strict=False, t ∧ AnyPair is used."""
    return _proj(t, 0, strict)


def proj_right(t: Ty, strict: bool = True) -> Ty:
    return _proj(t, 1, strict)


def const_type(c) -> Ty:
    """TyOfConst: singletons for ints and atoms, Float for floats."""
    if c.kind == "int":
        return T.sint(c.payload)
    if c.kind == "atom":
        return T.satom(c.payload)
    return T.FLOAT


def value_singleton(v: Value):
    """The most precise type of an arrow-free value, or None for closures."""
    if isinstance(v, VConst):
        return const_type(v.value)
    if isinstance(v, VPair):
        a = value_singleton(v.left)
        b = value_singleton(v.right)
        if a is None or b is None:
            return None
        return T.prod(a, b)
    if isinstance(v, VClosure):
        return None
    raise TypeError(f"not a value: {v!r}")


# -------------------------------------------------------------- display

def _named_recs(t: Ty) -> list:
    return [n for n in T._walk(t) if n.tag == T.REC and n.origin is not None]


def _simplify_mono(m: dnf.Mono, depth: int) -> Ty:
    if m == dnf.M_TOP:
        return T.TOP
    parts = [dnf.set_to_type(m.ints, T.INT, T.sint), dnf.set_to_type(m.atoms, T.ATOM, T.satom)]
    if m.flt:
        parts.append(T.FLOAT)
    for l, r, negs in m.pairs:
        if pair_line_empty(l, r, sorted(negs, key=_pair_key)):
            continue
        if negs:
            parts.append(dnf.pair_line_type((l, r, negs)))
        else:
            parts.append(T.prod(simplify(l, depth + 1), simplify(r, depth + 1)))
    for line in m.funs:
        if not fun_line_empty(*line):
            parts.append(dnf.fun_line_type(line))
    return T.union(*parts)


def simplify(t: Ty, depth: int = 0) -> Ty:
    """An equivalent, usually shorter, type for display.

    Empty parts of the normal form are dropped and a type equivalent to a
    named recursive type it mentions is shown by that name. The result is
    always checked equivalent to t; t itself is returned otherwise."""
    if t.tag in (T.REC, T.VAR, T.BASE, T.TOP_T, T.BOT_T) or depth > 4:
        return t
    if is_empty(t):
        return T.BOT
    for r in _named_recs(t):
        if equivalent(r, t):
            return r
    parts = []
    for (pv, nv), m in dnf.nf(t).items():
        if not pv and not nv:
            parts.append(_simplify_mono(m, depth))
        elif not is_empty(dnf.entry_type(pv, nv, m)):
            parts.append(T.inter(dnf.vars_type(pv, nv), _simplify_mono(m, depth)))
    s = T.union(*parts)
    for r in _named_recs(t):
        if equivalent(r, s):
            return r
    if len(T.show(s)) < len(T.show(t)) and equivalent(s, t):
        return s
    return t
