"""Hash-consed set-theoretic types, type schemes, substitutions and
validated type declarations.

Types are immutable `Ty` nodes interned in a process-wide table, so that
structurally equal nodes are the same object and `is` is type identity.
Recursive types are `Rec` nodes: mutable placeholders whose body is set
exactly once, created only by declaration instantiation and by the
equation solver in `tally`.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Optional

# ------------------------------------------------------------------ base types

BASE_KINDS = ("sint", "satom", "int", "float", "atom", "pair", "fun")


@dataclass(frozen=True)
class BaseType:
    """`sint`/`satom` are singletons carrying a value; the others are the
    Int, Float, Atom, AnyPair and AnyFun base types."""
    kind: str
    value: object = None

    def __post_init__(self):
        if self.kind not in BASE_KINDS:
            raise ValueError(f"unknown base kind {self.kind!r}")

    def __str__(self):
        if self.kind == "sint":
            return str(self.value)
        if self.kind == "satom":
            return "'" + self.value
        return self.kind


B_INT = BaseType("int")
B_FLOAT = BaseType("float")
B_ATOM = BaseType("atom")
B_PAIR = BaseType("pair")
B_FUN = BaseType("fun")


def singleton_int(i: int) -> BaseType:
    return BaseType("sint", int(i))


def singleton_atom(a: str) -> BaseType:
    return BaseType("satom", a)


# ------------------------------------------------------------ type variables

_var_ids = itertools.count()


class TyVar:
    """A type variable. Identity-compared; ordered by creation."""
    __slots__ = ("name", "id")

    def __init__(self, name: str):
        self.name = name
        self.id = next(_var_ids)

    def __lt__(self, other):
        return self.id < other.id

    def __repr__(self):
        return self.name


# --------------------------------------------------------------- type nodes

UNION, INTER, NEG, TOP_T, BOT_T, ARROW, PROD, VAR, BASE, REC = (
    "union", "inter", "neg", "top", "bot", "arrow", "prod", "var", "base", "rec")

_uids = itertools.count()
_table: dict = {}
_lock = threading.Lock()


class Ty:
    """An interned type node. Use the constructor functions, not this class."""
    __slots__ = ("tag", "args", "uid", "fv", "nf", "origin", "label")

    def __init__(self, tag, args):
        self.tag = tag
        self.args = args
        self.uid = next(_uids)
        self.fv = None
        self.nf = None
        self.origin = None
        self.label = None

    def __lt__(self, other):
        return self.uid < other.uid

    def __repr__(self):
        return show(self)

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return inter(self, other)

    def __invert__(self):
        return neg(self)

    def __sub__(self, other):
        return inter(self, neg(other))

    @property
    def body(self):
        """The definition of a `Rec` node."""
        assert self.tag == REC
        return self.args[0]

    def children(self):
        tag = self.tag
        if tag in (UNION, INTER):
            return self.args[0]
        if tag in (ARROW, PROD):
            return self.args
        if tag == NEG:
            return self.args
        if tag == REC:
            return (self.args[0],)
        return ()


def intern(tag, args) -> Ty:
    """Return the unique node for (tag, args), creating it if needed."""
    key = (tag, args)
    t = _table.get(key)
    if t is None:
        with _lock:
            t = _table.get(key)
            if t is None:
                t = Ty(tag, args)
                _table[key] = t
    return t


def store_size() -> int:
    return len(_table)


TOP = intern(TOP_T, ())
BOT = intern(BOT_T, ())


def base(b: BaseType) -> Ty:
    return intern(BASE, (b,))


INT = base(B_INT)
FLOAT = base(B_FLOAT)
ATOM = base(B_ATOM)
ANY_PAIR = base(B_PAIR)
ANY_FUN = base(B_FUN)


def sint(i: int) -> Ty:
    return base(singleton_int(i))


def satom(a: str) -> Ty:
    return base(singleton_atom(a))


def var(v: TyVar) -> Ty:
    return intern(VAR, (v,))


def fresh_var(name: str = "a") -> Ty:
    return var(TyVar(name))


def arrow(d: Ty, c: Ty) -> Ty:
    return intern(ARROW, (d, c))


def prod(left: Ty, right: Ty) -> Ty:
    return intern(PROD, (left, right))


def neg(t: Ty) -> Ty:
    if t.tag == NEG:
        return t.args[0]
    if t is TOP:
        return BOT
    if t is BOT:
        return TOP
    return intern(NEG, (t,))


def union(*ts: Ty) -> Ty:
    items = set()
    for t in ts:
        if t.tag == UNION:
            items.update(t.args[0])
        elif t is TOP:
            return TOP
        elif t is not BOT:
            items.add(t)
    for t in items:
        if t.tag == NEG and t.args[0] in items:
            return TOP
    if not items:
        return BOT
    if len(items) == 1:
        return next(iter(items))
    return intern(UNION, (frozenset(items),))


def inter(*ts: Ty) -> Ty:
    items = set()
    for t in ts:
        if t.tag == INTER:
            items.update(t.args[0])
        elif t is BOT:
            return BOT
        elif t is not TOP:
            items.add(t)
    for t in items:
        if t.tag == NEG and t.args[0] in items:
            return BOT
    if not items:
        return TOP
    if len(items) == 1:
        return next(iter(items))
    return intern(INTER, (frozenset(items),))


def diff(s: Ty, t: Ty) -> Ty:
    """s ∧ ¬t."""
    return inter(s, neg(t))


def union_all(ts) -> Ty:
    return union(*ts)


def inter_all(ts) -> Ty:
    return inter(*ts)


def rec(label: Optional[str] = None) -> Ty:
    """A fresh recursive placeholder; call `define_rec` once to set its body."""
    t = Ty(REC, [None])
    t.label = label
    return t


def define_rec(r: Ty, body: Ty) -> Ty:
    assert r.tag == REC and r.args[0] is None, "Rec body already set"
    r.args[0] = body
    return r


def list_of(t: Ty) -> Ty:
    """The builtin list(t) = 'nil | {t, list(t)}."""
    return PRELUDE.instantiate("list", (t,))


# ------------------------------------------------------------------ schemes

@dataclass(frozen=True)
class TypeScheme:
    quantified: frozenset
    body: Ty

    @staticmethod
    def mono(t: Ty) -> "TypeScheme":
        return TypeScheme(frozenset(), t)

    def __str__(self):
        if not self.quantified:
            return show(self.body)
        vs = " ".join(v.name for v in sorted(self.quantified))
        return f"forall {vs}. {show(self.body)}"


# --------------------------------------------------------- graph traversals

def _walk(t: Ty):
    """Yield every node reachable from t, each once."""
    seen = set()
    stack = [t]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        yield n
        stack.extend(n.children())


def free_tyvars(x) -> frozenset:
    """Type variables of a type, a scheme, or an environment (a mapping to
    schemes or types)."""
    if isinstance(x, TypeScheme):
        return free_tyvars(x.body) - x.quantified
    if isinstance(x, dict):
        out = set()
        for s in x.values():
            out |= free_tyvars(s)
        return frozenset(out)
    t = x
    if t.fv is not None:
        return t.fv
    out = frozenset(n.args[0] for n in _walk(t) if n.tag == VAR)
    t.fv = out
    return out


def is_ground(t: Ty) -> bool:
    return not free_tyvars(t)


def mentions_arrow(t: Ty) -> bool:
    return any(n.tag == ARROW or (n.tag == BASE and n.args[0] == B_FUN) for n in _walk(t))


def is_recursive(t: Ty) -> bool:
    return any(n.tag == REC for n in _walk(t))


def apply_subst(t: Ty, theta: dict) -> Ty:
    """Replace every variable of dom(theta) in t. Cyclic types are rebuilt
    through fresh `Rec` nodes, or through the declaring constructor when the
    cycle came from a declaration (so list(a)[1/a] is list(1))."""
    if not theta:
        return t
    dom = frozenset(theta)
    memo = {}

    def go(n: Ty) -> Ty:
        if free_tyvars(n).isdisjoint(dom):
            return n
        r = memo.get(n)
        if r is not None:
            return r
        tag = n.tag
        if tag == VAR:
            r = theta.get(n.args[0], n)
        elif tag == REC:
            if n.origin is not None:
                ctors, name, args = n.origin
                r = ctors.instantiate(name, tuple(go(a) for a in args))
            else:
                r = rec(n.label)
                memo[n] = r
                define_rec(r, go(n.body))
                return r
        elif tag == UNION:
            r = union(*[go(a) for a in n.args[0]])
        elif tag == INTER:
            r = inter(*[go(a) for a in n.args[0]])
        elif tag == NEG:
            r = neg(go(n.args[0]))
        elif tag == ARROW:
            r = arrow(go(n.args[0]), go(n.args[1]))
        elif tag == PROD:
            r = prod(go(n.args[0]), go(n.args[1]))
        else:
            r = n
        memo[n] = r
        return r

    return go(t)


def instantiate_scheme(s: TypeScheme, fresh) -> Ty:
    """Instantiate the quantified variables of s with fresh ones."""
    if not s.quantified:
        return s.body
    theta = {v: fresh(v.name) for v in sorted(s.quantified)}
    return apply_subst(s.body, theta)


def occurs_unguarded(v: TyVar, t: Ty) -> bool:
    """Does variable v occur in t outside every Arrow/Product constructor?"""
    seen = set()
    stack = [t]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if n.tag == VAR and n.args[0] is v:
            return True
        if n.tag in (UNION, INTER, NEG, REC):
            stack.extend(n.children())
    return False


# ----------------------------------------------------------------- printing

def show(t: Ty) -> str:
    """Render a type in the concrete syntax (anonymous recursive types are
    rendered as `μX.t`, which is display-only)."""
    names: dict = {}
    active: set = set()

    def key(n):
        return n.uid

    def go(n: Ty, prec: int) -> str:
        tag = n.tag
        if tag == TOP_T:
            return "any"
        if tag == BOT_T:
            return "none"
        if tag == BASE:
            return str(n.args[0])
        if tag == VAR:
            return n.args[0].name
        if tag == REC:
            if n.origin is not None:
                _, name, args = n.origin
                if not args:
                    return name
                return f"{name}({', '.join(go(a, 0) for a in args)})"
            if n in active:
                return names[n]
            if n.args[0] is None:
                return "<undefined rec>"
            if n not in names:
                names[n] = n.label or f"X{len(names) + 1}"
            active.add(n)
            s = f"μ{names[n]}.{go(n.body, 4)}"
            active.discard(n)
            return s if prec == 0 else f"({s})"
        if tag == PROD:
            return "{" + go(n.args[0], 0) + ", " + go(n.args[1], 0) + "}"
        if tag == ARROW:
            s = go(n.args[0], 4) + " -> " + go(n.args[1], 3)
            return s if prec <= 3 else f"({s})"
        if tag == NEG:
            s = "!" + go(n.args[0], 2)
            return s if prec <= 2 else f"({s})"
        if tag == INTER:
            s = " & ".join(go(a, 2) for a in sorted(n.args[0], key=key))
            return s if prec <= 1 else f"({s})"
        if tag == UNION:
            s = " | ".join(go(a, 1) for a in sorted(n.args[0], key=key))
            return s if prec == 0 else f"({s})"
        return f"<{tag}>"

    return go(t, 0)


# ------------------------------------------------------- type expressions

class TypeExpr:
    __slots__ = ()


@dataclass(frozen=True)
class TName(TypeExpr):
    """A named type or, when undeclared and applied to nothing, a variable."""
    name: str
    args: tuple = ()
    loc: object = field(default=None, compare=False)


@dataclass(frozen=True)
class TBase(TypeExpr):
    base: BaseType


@dataclass(frozen=True)
class TTop(TypeExpr):
    pass


@dataclass(frozen=True)
class TBot(TypeExpr):
    pass


@dataclass(frozen=True)
class TArrow(TypeExpr):
    dom: TypeExpr
    cod: TypeExpr


@dataclass(frozen=True)
class TProd(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class TUnion(TypeExpr):
    items: tuple


@dataclass(frozen=True)
class TInter(TypeExpr):
    items: tuple


@dataclass(frozen=True)
class TNeg(TypeExpr):
    arg: TypeExpr


@dataclass(frozen=True)
class TypeDecl:
    name: str
    params: tuple
    body: TypeExpr
    loc: object = field(default=None, compare=False)


def texpr_names(te: TypeExpr):
    """Yield every TName occurrence together with whether it is guarded by
    an arrow or product constructor."""
    stack = [(te, False)]
    while stack:
        n, guarded = stack.pop()
        if isinstance(n, TName):
            yield n, guarded
            for a in n.args:
                stack.append((a, guarded))
        elif isinstance(n, (TArrow,)):
            stack.append((n.dom, True))
            stack.append((n.cod, True))
        elif isinstance(n, TProd):
            stack.append((n.left, True))
            stack.append((n.right, True))
        elif isinstance(n, (TUnion, TInter)):
            stack.extend((a, guarded) for a in n.items)
        elif isinstance(n, TNeg):
            stack.append((n.arg, guarded))


class TypeDeclError(Exception):
    code = "type-decl"

    def __init__(self, message: str, loc=None):
        super().__init__(message)
        self.message = message
        self.loc = loc


class NonRegular(TypeDeclError):
    code = "non-regular"


class NonContractive(TypeDeclError):
    code = "non-contractive"


class UnknownName(TypeDeclError):
    code = "unknown-name"


def _sccs(graph: dict) -> list:
    """Tarjan's algorithm; returns SCCs as lists (iterative)."""
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = itertools.count()
    for root in graph:
        if root in index:
            continue
        work = [(root, iter(sorted(graph[root])))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = next(counter)
                    stack.append(nxt)
                    on.add(nxt)
                    work.append((nxt, iter(sorted(graph[nxt]))))
                    advanced = True
                    break
                if nxt in on:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(comp)
    return out


class TypeConstructors:
    """Validated declarations, instantiable with argument types."""

    def __init__(self, decls: dict, parent: Optional["TypeConstructors"] = None):
        self.decls = dict(parent.decls) if parent else {}
        self.decls.update(decls)
        self.parent = parent
        self.recursive: set = set()
        self.delegated: set = set()
        self._inst: dict = {}
        self._lock = threading.RLock()

    def __contains__(self, name):
        return name in self.decls

    def arity(self, name) -> int:
        return len(self.decls[name].params)

    def instantiate(self, name: str, args: tuple = ()) -> Ty:
        if name in self.delegated:
            return self.parent.instantiate(name, args)
        key = (name, args)
        t = self._inst.get(key)
        if t is not None:
            return t
        with self._lock:
            t = self._inst.get(key)
            if t is not None:
                return t
            d = self.decls[name]
            if len(args) != len(d.params):
                raise UnknownName(f"type {name} expects {len(d.params)} argument(s)", d.loc)
            env = dict(zip(d.params, args))
            if name in self.recursive:
                r = rec(name)
                r.origin = (self, name, args)
                self._inst[key] = r
                define_rec(r, self.resolve(d.body, env))
                return r
            t = self.resolve(d.body, env)
            self._inst[key] = t
            return t

    def resolve(self, te: TypeExpr, env: dict, open_vars: Optional[dict] = None) -> Ty:
        """Turn a type expression into a type. `env` maps variable names to
        types. Undeclared bare names become variables recorded in
        `open_vars` when given, and raise UnknownName otherwise."""
        go = lambda x: self.resolve(x, env, open_vars)  # noqa: E731
        if isinstance(te, TName):
            if not te.args and te.name in env:
                return env[te.name]
            if te.name in self.decls:
                return self.instantiate(te.name, tuple(go(a) for a in te.args))
            if not te.args and open_vars is not None:
                if te.name not in open_vars:
                    open_vars[te.name] = fresh_var(te.name)
                return open_vars[te.name]
            raise UnknownName(f"unknown type name {te.name}", te.loc)
        if isinstance(te, TBase):
            return base(te.base)
        if isinstance(te, TTop):
            return TOP
        if isinstance(te, TBot):
            return BOT
        if isinstance(te, TArrow):
            return arrow(go(te.dom), go(te.cod))
        if isinstance(te, TProd):
            return prod(go(te.left), go(te.right))
        if isinstance(te, TUnion):
            return union(*[go(a) for a in te.items])
        if isinstance(te, TInter):
            return inter(*[go(a) for a in te.items])
        if isinstance(te, TNeg):
            return neg(go(te.arg))
        raise TypeError(f"not a type expression: {te!r}")


def declare(decls, parent: Optional[TypeConstructors] = None) -> TypeConstructors:
    """Validate a group of declarations (regularity, contractivity, known
    names) and return the resulting constructor environment. Declarations
    shadow same-named ones from `parent` (the prelude by default)."""
    if parent is None:
        parent = PRELUDE
    decls = list(decls)
    by_name = {}
    for d in decls:
        if d.name in by_name:
            raise TypeDeclError(f"type {d.name} declared twice", d.loc)
        by_name[d.name] = d
    env = TypeConstructors(by_name, parent)
    all_decls = env.decls

    graph = {}
    for name, d in all_decls.items():
        deps = set()
        for occ, _ in texpr_names(d.body):
            if occ.name in all_decls and not (not occ.args and occ.name in d.params):
                target = all_decls[occ.name]
                if len(occ.args) != len(target.params):
                    raise UnknownName(
                        f"type {occ.name} expects {len(target.params)} argument(s), "
                        f"got {len(occ.args)}", occ.loc or d.loc)
                deps.add(occ.name)
            elif not occ.args and occ.name in d.params:
                pass
            else:
                raise UnknownName(f"unknown type name {occ.name} in declaration of {name}",
                                  occ.loc or d.loc)
        graph[name] = deps

    for comp in _sccs(graph):
        members = set(comp)
        cyclic = len(comp) > 1 or comp[0] in graph[comp[0]]
        if not cyclic:
            continue
        unguarded = {n: set() for n in comp}
        for name in comp:
            d = all_decls[name]
            for occ, guarded in texpr_names(d.body):
                if occ.name not in members or (not occ.args and occ.name in d.params):
                    continue
                target = all_decls[occ.name]
                own = tuple(TName(p) for p in target.params)
                if tuple(occ.args) != own or not set(target.params) <= set(d.params):
                    raise NonRegular(
                        f"recursive occurrence of {occ.name} in {name} must be applied to "
                        f"its own parameters ({', '.join(target.params)})", occ.loc or d.loc)
                if not guarded:
                    unguarded[name].add(occ.name)
        for sub in _sccs(unguarded):
            if len(sub) > 1 or sub[0] in unguarded[sub[0]]:
                bad = sorted(sub)[0]
                raise NonContractive(
                    f"type {bad} is defined in terms of itself without a "
                    f"product or arrow constructor", all_decls[bad].loc)
        env.recursive |= members

    # inherited declarations untouched by shadowing keep the parent's handles
    tainted = set(by_name)
    changed = True
    while changed:
        changed = False
        for name, deps in graph.items():
            if name not in tainted and deps & tainted:
                tainted.add(name)
                changed = True
    env.delegated = {n for n in parent.decls if n not in tainted}
    return env


def _prelude() -> TypeConstructors:
    lst = TypeDecl("list", ("a",), TUnion((
        TBase(singleton_atom("nil")),
        TProd(TName("a"), TName("list", (TName("a"),))))))
    boolean = TypeDecl("bool", (), TUnion((TBase(singleton_atom("true")),
                                            TBase(singleton_atom("false")))))
    empty = TypeConstructors({})
    return declare([lst, boolean], parent=empty)


PRELUDE = _prelude()


def to_dnf(t: Ty):
    """Disjunctive normal form of t as a list of (positive atoms, negative
    atoms) lines; see `dnf.lines`."""
    from . import dnf
    return dnf.lines(t)
