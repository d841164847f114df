"""Normal forms of types, split by kind.

A normal form (NF) is a mapping from a variable signature
``(positive vars, negative vars)`` to a `Mono`: the variable-free residue
of the lines with that signature, grouped by kind.

* ints, atoms: a finite or cofinite set of singletons, encoded
  ``(cofinite, values)``
* float: whether Float is included
* pairs: a set of product lines ``(left, right, negated)`` standing for
  ``{left, right} ∧ ¬{l1, r1} ∧ …``; positive products are merged by
  intersecting components
* funs: a set of arrow lines ``(positive arrows, negated arrows)``
  standing for ``AnyFun ∧ ⋀P ∧ ¬⋁N``

The NF of a recursive node is the NF of its body; contractivity guarantees
this terminates since products and arrows are not unfolded.
"""
from __future__ import annotations

from typing import NamedTuple

from . import typecore as T
from .typecore import Ty


class Mono(NamedTuple):
    ints: tuple
    atoms: tuple
    flt: bool
    pairs: frozenset
    funs: frozenset

    def is_trivially_empty(self) -> bool:
        return (not self.ints[0] and not self.ints[1]
                and not self.atoms[0] and not self.atoms[1]
                and not self.flt and not self.pairs and not self.funs)


_E = frozenset()
FIN_EMPTY = (False, _E)
COF_ALL = (True, _E)
PAIR_TOP_LINE = (T.TOP, T.TOP, _E)
FUN_TOP_LINE = (_E, _E)

M_BOT = Mono(FIN_EMPTY, FIN_EMPTY, False, _E, _E)
M_TOP = Mono(COF_ALL, COF_ALL, True, frozenset([PAIR_TOP_LINE]), frozenset([FUN_TOP_LINE]))


# --------------------------------------------------- finite/cofinite sets

def set_union(a, b):
    (ca, sa), (cb, sb) = a, b
    if not ca and not cb:
        return (False, sa | sb)
    if ca and cb:
        return (True, sa & sb)
    if ca:
        return (True, sa - sb)
    return (True, sb - sa)


def set_inter(a, b):
    (ca, sa), (cb, sb) = a, b
    if not ca and not cb:
        return (False, sa & sb)
    if ca and cb:
        return (True, sa | sb)
    if ca:
        return (False, sb - sa)
    return (False, sa - sb)


def set_neg(a):
    return (not a[0], a[1])


# ------------------------------------------------------------ pair lines

def _pair_line(l, r, negs):
    if l is T.BOT or r is T.BOT:
        return None
    kept = []
    for nl, nr in negs:
        if nl is T.TOP and nr is T.TOP:
            return None
        if nl is T.BOT or nr is T.BOT:
            continue
        kept.append((nl, nr))
    return (l, r, frozenset(kept))


def pairs_inter(a: frozenset, b: frozenset) -> frozenset:
    out = set()
    for l1, r1, n1 in a:
        for l2, r2, n2 in b:
            line = _pair_line(T.inter(l1, l2), T.inter(r1, r2), n1 | n2)
            if line is not None:
                out.add(line)
    return frozenset(out)


def pairs_neg(a: frozenset) -> frozenset:
    result = frozenset([PAIR_TOP_LINE])
    for l, r, negs in a:
        comp = {(T.TOP, T.TOP, frozenset([(l, r)]))}
        for nl, nr in negs:
            line = _pair_line(nl, nr, ())
            if line is not None:
                comp.add(line)
        result = pairs_inter(result, frozenset(comp))
        if not result:
            break
    return result


# ----------------------------------------------------------- arrow lines

def funs_inter(a: frozenset, b: frozenset) -> frozenset:
    return frozenset((p1 | p2, n1 | n2) for p1, n1 in a for p2, n2 in b)


def funs_neg(a: frozenset) -> frozenset:
    result = frozenset([FUN_TOP_LINE])
    for pos, negs in a:
        comp = {(_E, frozenset([x])) for x in pos}
        comp |= {(frozenset([x]), _E) for x in negs}
        result = funs_inter(result, frozenset(comp))
        if not result:
            break
    return result


# ------------------------------------------------------------ monos

def mono_union(a: Mono, b: Mono) -> Mono:
    return Mono(set_union(a.ints, b.ints), set_union(a.atoms, b.atoms),
                a.flt or b.flt, a.pairs | b.pairs, a.funs | b.funs)


def mono_inter(a: Mono, b: Mono) -> Mono:
    return Mono(set_inter(a.ints, b.ints), set_inter(a.atoms, b.atoms),
                a.flt and b.flt, pairs_inter(a.pairs, b.pairs), funs_inter(a.funs, b.funs))


def mono_neg(a: Mono) -> Mono:
    return Mono(set_neg(a.ints), set_neg(a.atoms), not a.flt,
                pairs_neg(a.pairs), funs_neg(a.funs))


def mono_of_base(b: T.BaseType) -> Mono:
    k = b.kind
    if k == "sint":
        return M_BOT._replace(ints=(False, frozenset([b.value])))
    if k == "satom":
        return M_BOT._replace(atoms=(False, frozenset([b.value])))
    if k == "int":
        return M_BOT._replace(ints=COF_ALL)
    if k == "atom":
        return M_BOT._replace(atoms=COF_ALL)
    if k == "float":
        return M_BOT._replace(flt=True)
    if k == "pair":
        return M_BOT._replace(pairs=frozenset([PAIR_TOP_LINE]))
    if k == "fun":
        return M_BOT._replace(funs=frozenset([FUN_TOP_LINE]))
    raise ValueError(k)


# ---------------------------------------------------------- normal forms

NO_VARS = (_E, _E)


def _add(nf: dict, key, m: Mono):
    old = nf.get(key)
    nf[key] = m if old is None else mono_union(old, m)


def nf_union(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, m in b.items():
        _add(out, k, m)
    return out


def nf_inter(a: dict, b: dict) -> dict:
    out = {}
    for (p1, n1), m1 in a.items():
        for (p2, n2), m2 in b.items():
            pv, nv = p1 | p2, n1 | n2
            if not pv.isdisjoint(nv):
                continue
            m = mono_inter(m1, m2)
            if m.is_trivially_empty():
                continue
            _add(out, (pv, nv), m)
    return out


def nf_neg(a: dict) -> dict:
    result = {NO_VARS: M_TOP}
    for (pv, nv), m in a.items():
        clause = {}
        for v in pv:
            clause[(_E, frozenset([v]))] = M_TOP
        for v in nv:
            _add(clause, (frozenset([v]), _E), M_TOP)
        mn = mono_neg(m)
        if not mn.is_trivially_empty():
            _add(clause, NO_VARS, mn)
        result = nf_inter(result, clause)
        if not result:
            break
    return result


def nf(t: Ty) -> dict:
    """The (cached) normal form of t. Treat the result as read-only."""
    if t.nf is not None:
        return t.nf
    tag = t.tag
    if tag == T.TOP_T:
        r = {NO_VARS: M_TOP}
    elif tag == T.BOT_T:
        r = {}
    elif tag == T.BASE:
        r = {NO_VARS: mono_of_base(t.args[0])}
    elif tag == T.PROD:
        line = _pair_line(t.args[0], t.args[1], ())
        r = {} if line is None else {NO_VARS: M_BOT._replace(pairs=frozenset([line]))}
    elif tag == T.ARROW:
        r = {NO_VARS: M_BOT._replace(funs=frozenset([(frozenset([t.args]), _E)]))}
    elif tag == T.VAR:
        r = {(frozenset([t.args[0]]), _E): M_TOP}
    elif tag == T.UNION:
        r = {}
        for a in sorted(t.args[0]):
            r = nf_union(r, nf(a))
    elif tag == T.INTER:
        r = {NO_VARS: M_TOP}
        for a in sorted(t.args[0]):
            r = nf_inter(r, nf(a))
            if not r:
                break
    elif tag == T.NEG:
        r = nf_neg(nf(t.args[0]))
    elif tag == T.REC:
        r = nf(t.body)
    else:
        raise ValueError(tag)
    t.nf = r
    return r


# ------------------------------------------------------ back to types

def set_to_type(s, kind_top: Ty, mk) -> Ty:
    cof, vals = s
    singles = [mk(v) for v in sorted(vals, key=repr)]
    if cof:
        return T.inter(kind_top, *[T.neg(x) for x in singles])
    return T.union(*singles)


def pair_line_type(line) -> Ty:
    l, r, negs = line
    return T.inter(T.prod(l, r), *[T.neg(T.prod(nl, nr)) for nl, nr in negs])


def fun_line_type(line) -> Ty:
    pos, negs = line
    return T.inter(T.ANY_FUN, *[T.arrow(d, c) for d, c in pos],
                   *[T.neg(T.arrow(d, c)) for d, c in negs])


def mono_to_type(m: Mono) -> Ty:
    if m == M_TOP:
        return T.TOP
    parts = [set_to_type(m.ints, T.INT, T.sint), set_to_type(m.atoms, T.ATOM, T.satom)]
    if m.flt:
        parts.append(T.FLOAT)
    parts += [pair_line_type(x) for x in m.pairs]
    parts += [fun_line_type(x) for x in m.funs]
    return T.union(*parts)


def vars_type(pv, nv) -> Ty:
    return T.inter(*[T.var(v) for v in sorted(pv)], *[T.neg(T.var(v)) for v in sorted(nv)])


def entry_type(pv, nv, m: Mono) -> Ty:
    return T.inter(vars_type(pv, nv), mono_to_type(m))


def lines(t: Ty) -> list:
    """The DNF of t as a list of (positive atoms, negative atoms) lines,
    where atoms are Base, Product, Arrow and Var nodes."""
    out = []
    for (pv, nv), m in nf(t).items():
        P = {T.var(v) for v in pv}
        N = {T.var(v) for v in nv}
        if m == M_TOP:
            out.append((frozenset(P), frozenset(N)))
            continue
        for s, top, mk in ((m.ints, T.INT, T.sint), (m.atoms, T.ATOM, T.satom)):
            cof, vals = s
            if cof:
                out.append((frozenset(P | {top}), frozenset(N | {mk(v) for v in vals})))
            else:
                for v in sorted(vals, key=repr):
                    out.append((frozenset(P | {mk(v)}), frozenset(N)))
        if m.flt:
            out.append((frozenset(P | {T.FLOAT}), frozenset(N)))
        for l, r, negs in m.pairs:
            pos = T.ANY_PAIR if (l is T.TOP and r is T.TOP) else T.prod(l, r)
            out.append((frozenset(P | {pos}), frozenset(N | {T.prod(a, b) for a, b in negs})))
        for pos, negs in m.funs:
            ps = {T.arrow(d, c) for d, c in pos} or {T.ANY_FUN}
            out.append((frozenset(P | ps), frozenset(N | {T.arrow(d, c) for d, c in negs})))
    return out
