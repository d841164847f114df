"""A brute-force finite model for arrow-free, variable-free types.

Types are interpreted as sets of values built from a finite universe of
constants with pairs nested up to `max_depth`. This is the ground truth the
subtyping algorithm is tested against; it shares no code with it.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import typecore as T
from .syntax import Constant, Var
from .typecore import Ty
from .values import VClosure, VConst, VPair, Value


class UnsupportedType(Exception):
    pass


@dataclass(frozen=True)
class Universe:
    """Constants available to the model. `include_fun` adds one opaque
    function value, which only Top, AnyFun and complements contain; with it
    the complement of a type is faithful to the full model."""
    atoms: frozenset
    ints: frozenset
    include_float: bool = False
    max_depth: int = 1
    include_fun: bool = False

    def __post_init__(self):
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        object.__setattr__(self, "ints", frozenset(self.ints))
        if not self.atoms or not self.ints:
            raise ValueError("a universe needs at least one atom and one integer")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")


FLOAT_WITNESS = VConst(Constant("float", 0.5))
FUN_WITNESS = VClosure("x", Var("x"), None)


def constants(u: Universe) -> list:
    out = [VConst(Constant("atom", a)) for a in sorted(u.atoms)]
    out += [VConst(Constant("int", i)) for i in sorted(u.ints)]
    if u.include_float:
        out.append(FLOAT_WITNESS)
    if u.include_fun:
        out.append(FUN_WITNESS)
    return out


def enumerate_values(u: Universe) -> set:
    """All constants of u plus all pairs nested up to u.max_depth."""
    level = list(constants(u))
    for _ in range(u.max_depth):
        consts = constants(u)
        level = consts + [VPair(a, b) for a in level for b in level]
    return set(level)


enumerate = enumerate_values  # noqa: A001  (short public alias)


def _check_supported(t: Ty):
    for n in T._walk(t):
        if n.tag in (T.ARROW, T.VAR):
            raise UnsupportedType(f"finite model cannot interpret {T.show(n)}")


def _base_member(v: Value, b: T.BaseType) -> bool:
    if isinstance(v, VConst):
        c = v.value
        if b.kind == "sint":
            return c.kind == "int" and c.payload == b.value
        if b.kind == "satom":
            return c.kind == "atom" and c.payload == b.value
        return b.kind == c.kind
    if isinstance(v, VPair):
        return b.kind == "pair"
    return b.kind == "fun"


def member(v: Value, t: Ty) -> bool:
    tag = t.tag
    if tag == T.TOP_T:
        return True
    if tag == T.BOT_T:
        return False
    if tag == T.BASE:
        return _base_member(v, t.args[0])
    if tag == T.PROD:
        return isinstance(v, VPair) and member(v.left, t.args[0]) and member(v.right, t.args[1])
    if tag == T.UNION:
        return any(member(v, a) for a in t.args[0])
    if tag == T.INTER:
        return all(member(v, a) for a in t.args[0])
    if tag == T.NEG:
        return not member(v, t.args[0])
    if tag == T.REC:
        return member(v, t.body)
    raise UnsupportedType(T.show(t))


def denote(t: Ty, u: Universe) -> set:
    _check_supported(t)
    return {v for v in enumerate_values(u) if member(v, t)}


# ------------------------------------------------------------------ oracle

def _profile(nodes, mem_fn) -> frozenset:
    memo: dict = {}

    def mem(n):
        r = memo.get(n)
        if r is None:
            r = mem_fn(n, mem)
            memo[n] = r
        return r

    return frozenset(n for n in nodes if mem(n))


def _const_mem(v):
    def f(n, mem):
        tag = n.tag
        if tag == T.TOP_T:
            return True
        if tag == T.BOT_T:
            return False
        if tag == T.BASE:
            return _base_member(v, n.args[0])
        if tag == T.PROD:
            return False
        if tag == T.UNION:
            return any(mem(a) for a in n.args[0])
        if tag == T.INTER:
            return all(mem(a) for a in n.args[0])
        if tag == T.NEG:
            return not mem(n.args[0])
        return mem(n.body)
    return f


def _pair_mem(p1, p2):
    def f(n, mem):
        tag = n.tag
        if tag == T.TOP_T:
            return True
        if tag == T.BOT_T:
            return False
        if tag == T.BASE:
            return n.args[0].kind == "pair"
        if tag == T.PROD:
            return n.args[0] in p1 and n.args[1] in p2
        if tag == T.UNION:
            return any(mem(a) for a in n.args[0])
        if tag == T.INTER:
            return all(mem(a) for a in n.args[0])
        if tag == T.NEG:
            return not mem(n.args[0])
        return mem(n.body)
    return f


def subtype_oracle(s: Ty, t: Ty, u: Universe) -> bool:
    """denote(s, u) ⊆ denote(t, u).

    Computed without materialising the universe: membership of a pair in
    any node depends only on which nodes contain its components, so values
    are grouped by their membership profile over the nodes of s and t, and
    profiles are closed under pairing up to the depth bound."""
    _check_supported(s)
    _check_supported(t)
    nodes = list({n for root in (s, t) for n in T._walk(root)})
    base_profiles = {_profile(nodes, _const_mem(v)) for v in constants(u)}
    level = set(base_profiles)
    cache: dict = {}
    for _ in range(u.max_depth):
        nxt = set(base_profiles)
        for p1 in level:
            for p2 in level:
                key = (p1, p2)
                p = cache.get(key)
                if p is None:
                    p = _profile(nodes, _pair_mem(p1, p2))
                    cache[key] = p
                nxt.add(p)
        level = nxt
    return all(t in p for p in level if s in p)
