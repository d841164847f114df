"""Concrete syntax of MinErl programs and types.

    program  ::= item*
    item     ::= 'type' NAME ('(' NAME, ... ')')? '=' type ';'
               | 'def' NAME (':' scheme)? '=' expr ';'
               | 'main' (':' type)? '=' expr ';'
    scheme   ::= ('forall' NAME+ '.')? type
    type     ::= type '|' type | type '&' type | '!' type | type '->' type
               | '{' type, ... '}' | '[' type ']' | '[' ']' | "'atom" | INT | INT '..' INT
               | 'any' | 'none' | 'int' | 'float' | 'atom' | 'pair' | 'fun'
               | NAME ('(' type, ... ')')? | '(' type ')'
    expr     ::= 'fun' NAME+ '->' expr | 'letrec' binding (';' binding)* 'in' expr
               | aexpr aexpr*                      (application)
    aexpr    ::= NAME | INT | FLOAT | "'atom" | '(' expr ')' | '{' expr, ... '}'
               | '[' expr, ... ('|' expr)? ']'
               | 'case' expr 'of' clause (';' clause)* 'end'
    clause   ::= pattern ('when' guard)? '->' expr
    guard    ::= gatom ('and' gatom)*
    gatom    ::= 'is' base NAME | 'true' | 'oracle' | '(' guard ')'

Precedence in types, loosest first: '|', '&', '!', '->' (right
associative). Tuples with n >= 3 components become {n, {t1, {..., tn}}};
lists become 'nil-terminated pairs. `%` starts a line comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import typecore as T
from .syntax import (Abs, And, App, Case, Clause, Const, Constant, Definition, Expr, GTrue,
                     GuardedPattern, Is, Letrec, Loc, Module, Oracle, Pair, PConst, PPair,
                     PVar, PWild, Var)
from .typecore import (TArrow, TBase, TBot, TInter, TName, TNeg, TProd, TTop, TUnion,
                       TypeDecl, TypeScheme)

MAX_RANGE = 1024

KEYWORDS = {
    "type", "def", "main", "forall", "fun", "case", "of", "when", "end", "letrec", "in",
    "is", "and", "true", "oracle", "any", "none", "int", "float", "atom", "pair",
}

BASE_KEYWORDS = {
    "int": T.B_INT, "float": T.B_FLOAT, "atom": T.B_ATOM, "pair": T.B_PAIR, "fun": T.B_FUN,
}


class ParseError(Exception):
    code = "parse-error"

    def __init__(self, message: str, loc: Loc):
        super().__init__(f"{loc}: {message}")
        self.message = message
        self.loc = loc


@dataclass(frozen=True)
class Token:
    kind: str  # 'name', 'kw', 'int', 'float', 'atom', 'op', 'eof'
    text: str
    loc: Loc


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<float>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<atom>'[A-Za-z0-9_@]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_@]*)
  | (?P<op>->|\.\.|[(){}\[\],;|&!.=:-])
""", re.VERBOSE)


def tokenize(text: str) -> list:
    out = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", Loc(line, pos - line_start + 1))
        kind = m.lastgroup
        s = m.group()
        loc = Loc(line, pos - line_start + 1)
        if kind != "ws":
            if kind == "name" and s in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, s, loc))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", Loc(line, pos - line_start + 1)))
    return out


@dataclass(frozen=True)
class SchemeExpr:
    """An unresolved annotation: quantified names and a type expression."""
    quantified: tuple
    body: object
    loc: Loc


def tuple_type(items: list):
    """n-ary tuple encoding: pairs for n = 2, {n, {t1, {..., tn}}} above."""
    nested = items[-1]
    for it in reversed(items[:-1]):
        nested = ("pair", it, nested)
    if len(items) == 2:
        return nested
    return ("pair", ("int", len(items)), nested)


class Parser:
    def __init__(self, text: str, path: str = "<input>"):
        self.toks = tokenize(text)
        self.i = 0
        self.path = path

    # ------------------------------------------------------------ helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "kw")

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def expect_name(self) -> Token:
        if self.tok.kind != "name":
            self.error("expected a name")
        return self.advance()

    def error(self, msg: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", t.loc)

    # -------------------------------------------------------------- items
    def program(self):
        decls, defs, main, main_ann, main_loc = [], [], None, None, None
        while self.tok.kind != "eof":
            t = self.tok
            if self.at("type"):
                decls.append(self.type_decl())
            elif self.at("def"):
                defs.append(self.definition(top=True))
                self.expect(";")
            elif self.at("main"):
                if main is not None:
                    self.error("main defined twice")
                self.advance()
                if self.at(":"):
                    self.advance()
                    main_ann = SchemeExpr((), self.type_(), t.loc)
                self.expect("=")
                main = self.expr()
                main_loc = t.loc
                self.expect(";")
            else:
                self.error("expected 'type', 'def' or 'main'")
        return decls, defs, main, main_ann, main_loc

    def type_decl(self) -> TypeDecl:
        loc = self.expect("type").loc
        name = self.expect_name().text
        params = []
        if self.at("("):
            self.advance()
            if not self.at(")"):
                params.append(self.expect_name().text)
                while self.at(","):
                    self.advance()
                    params.append(self.expect_name().text)
            self.expect(")")
        if len(set(params)) != len(params):
            raise ParseError(f"repeated parameter in type {name}", loc)
        self.expect("=")
        body = self.type_()
        self.expect(";")
        return TypeDecl(name, tuple(params), body, loc)

    def scheme(self) -> SchemeExpr:
        loc = self.tok.loc
        qs = []
        if self.at("forall"):
            self.advance()
            while self.tok.kind == "name":
                qs.append(self.advance().text)
            if not qs:
                self.error("expected type variables after 'forall'")
            self.expect(".")
        return SchemeExpr(tuple(qs), self.type_(), loc)

    def definition(self, top=False) -> Definition:
        if top:
            self.expect("def")
        tok = self.expect_name()
        ann = None
        if self.at(":"):
            self.advance()
            ann = self.scheme()
        self.expect("=")
        rhs = self.expr()
        if not isinstance(rhs, Abs):
            raise ParseError(f"definition {tok.text} must be a function (fun ... -> ...)", tok.loc)
        return Definition(tok.text, ann, rhs, tok.loc)

    # -------------------------------------------------------------- types
    def type_(self):
        items = [self.type_inter()]
        while self.at("|"):
            self.advance()
            items.append(self.type_inter())
        return items[0] if len(items) == 1 else TUnion(tuple(items))

    def type_inter(self):
        items = [self.type_neg()]
        while self.at("&"):
            self.advance()
            items.append(self.type_neg())
        return items[0] if len(items) == 1 else TInter(tuple(items))

    def type_neg(self):
        if self.at("!"):
            self.advance()
            return TNeg(self.type_neg())
        return self.type_arrow()

    def type_arrow(self):
        left = self.type_atom()
        if self.at("->"):
            self.advance()
            return TArrow(left, self.type_arrow())
        return left

    def int_literal(self) -> int:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        if self.tok.kind != "int":
            self.error("expected an integer")
        v = int(self.advance().text)
        return -v if neg else v

    def type_atom(self):
        t = self.tok
        if self.at("("):
            self.advance()
            inner = self.type_()
            self.expect(")")
            return inner
        if self.at("{"):
            self.advance()
            items = self.type_list("}")
            self.expect("}")
            if len(items) < 2:
                raise ParseError("tuples need at least two components", t.loc)
            return _tuple_texpr(items)
        if self.at("["):
            self.advance()
            if self.at("]"):
                self.advance()
                return TBase(T.singleton_atom("nil"))
            inner = self.type_()
            self.expect("]")
            return TName("list", (inner,), t.loc)
        if t.kind == "atom":
            self.advance()
            return TBase(T.singleton_atom(t.text[1:]))
        if t.kind == "int" or self.at("-"):
            lo = self.int_literal()
            if self.at(".."):
                self.advance()
                hi = self.int_literal()
                if hi < lo:
                    raise ParseError(f"empty range {lo}..{hi}", t.loc)
                if hi - lo >= MAX_RANGE:
                    raise ParseError(f"range {lo}..{hi} is wider than {MAX_RANGE}", t.loc)
                return TUnion(tuple(TBase(T.singleton_int(i)) for i in range(lo, hi + 1)))
            return TBase(T.singleton_int(lo))
        if t.kind == "kw":
            if t.text == "any":
                self.advance()
                return TTop()
            if t.text == "none":
                self.advance()
                return TBot()
            if t.text in BASE_KEYWORDS:
                self.advance()
                return TBase(BASE_KEYWORDS[t.text])
        if t.kind == "name":
            self.advance()
            args = ()
            if self.at("("):
                self.advance()
                args = tuple(self.type_list(")"))
                self.expect(")")
            return TName(t.text, args, t.loc)
        self.error("expected a type")

    def type_list(self, close: str) -> list:
        items = []
        if self.at(close):
            return items
        items.append(self.type_())
        while self.at(","):
            self.advance()
            items.append(self.type_())
        return items

    # -------------------------------------------------------- expressions
    def expr(self) -> Expr:
        if self.at("fun"):
            self.advance()
            params = [self.expect_name().text]
            while self.tok.kind == "name":
                params.append(self.advance().text)
            self.expect("->")
            body = self.expr()
            for p in reversed(params):
                body = Abs(p, body)
            return body
        if self.at("letrec"):
            loc = self.advance().loc
            defs = [self.definition()]
            while self.at(";"):
                self.advance()
                defs.append(self.definition())
            self.expect("in")
            body = self.expr()
            names = [d.name for d in defs]
            if len(set(names)) != len(names):
                raise ParseError("letrec names must be distinct", loc)
            return Letrec(tuple(defs), body)
        return self.application()

    def _starts_aexpr(self) -> bool:
        t = self.tok
        if t.kind in ("name", "int", "float", "atom"):
            return True
        if t.kind == "op" and t.text in ("(", "{", "[", "-"):
            return t.text != "-" or self.peek().kind in ("int", "float")
        return t.kind == "kw" and t.text in ("case", "fun", "letrec")

    def application(self) -> Expr:
        e = self.aexpr()
        while self._starts_aexpr():
            if self.at("fun") or self.at("letrec"):
                e = App(e, self.expr())
                break
            e = App(e, self.aexpr())
        return e

    def number(self, negate=False):
        t = self.advance()
        if t.kind == "int":
            v = int(t.text)
            return Constant("int", -v if negate else v)
        if t.kind == "float":
            v = float(t.text)
            return Constant("float", -v if negate else v)
        raise ParseError("expected a number", t.loc)

    def aexpr(self) -> Expr:
        t = self.tok
        if t.kind == "name":
            self.advance()
            return Var(t.text)
        if t.kind in ("int", "float"):
            return Const(self.number())
        if self.at("-"):
            self.advance()
            return Const(self.number(negate=True))
        if t.kind == "atom":
            self.advance()
            return Const(Constant("atom", t.text[1:]))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("{"):
            self.advance()
            items = [self.expr()]
            while self.at(","):
                self.advance()
                items.append(self.expr())
            self.expect("}")
            if len(items) < 2:
                raise ParseError("tuples need at least two components", t.loc)
            return _tuple_build(items, Pair, lambda n: Const(Constant("int", n)))
        if self.at("["):
            self.advance()
            items, tail = self.list_items(self.expr)
            return _list_build(items, tail, Pair, Const(Constant("atom", "nil")))
        if self.at("case"):
            self.advance()
            scrutinee = self.expr()
            self.expect("of")
            clauses = [self.clause()]
            while self.at(";"):
                self.advance()
                clauses.append(self.clause())
            self.expect("end")
            return Case(scrutinee, tuple(clauses), t.loc)
        self.error("expected an expression")

    def list_items(self, item):
        items, tail = [], None
        if self.at("]"):
            self.advance()
            return items, tail
        items.append(item())
        while self.at(","):
            self.advance()
            items.append(item())
        if self.at("|"):
            self.advance()
            tail = item()
        self.expect("]")
        return items, tail

    def clause(self) -> Clause:
        loc = self.tok.loc
        p = self.pattern()
        g = GTrue()
        if self.at("when"):
            self.advance()
            g = self.guard()
        self.expect("->")
        return Clause(GuardedPattern(p, g), self.expr(), loc)

    # ----------------------------------------------------------- patterns
    def pattern(self):
        t = self.tok
        if t.kind == "name":
            self.advance()
            return PWild() if t.text == "_" else PVar(t.text)
        if t.kind in ("int", "float"):
            return PConst(self.number())
        if self.at("-"):
            self.advance()
            return PConst(self.number(negate=True))
        if t.kind == "atom":
            self.advance()
            return PConst(Constant("atom", t.text[1:]))
        if self.at("("):
            self.advance()
            p = self.pattern()
            self.expect(")")
            return p
        if self.at("{"):
            self.advance()
            items = [self.pattern()]
            while self.at(","):
                self.advance()
                items.append(self.pattern())
            self.expect("}")
            if len(items) < 2:
                raise ParseError("tuples need at least two components", t.loc)
            return _tuple_build(items, PPair, lambda n: PConst(Constant("int", n)))
        if self.at("["):
            self.advance()
            items, tail = self.list_items(self.pattern)
            return _list_build(items, tail, PPair, PConst(Constant("atom", "nil")))
        self.error("expected a pattern")

    # ------------------------------------------------------------- guards
    def guard(self):
        g = self.guard_atom()
        while self.at("and"):
            self.advance()
            g = And(g, self.guard_atom())
        return g

    def guard_atom(self):
        t = self.tok
        if self.at("true"):
            self.advance()
            return GTrue()
        if self.at("oracle"):
            self.advance()
            return Oracle()
        if self.at("("):
            self.advance()
            g = self.guard()
            self.expect(")")
            return g
        if self.at("is"):
            self.advance()
            b = self.guard_base()
            if self.tok.kind != "name":
                self.error("type tests apply to variables only")
            return Is(b, self.advance().text)
        self.error("expected a guard")

    def guard_base(self) -> T.BaseType:
        t = self.tok
        if t.kind == "kw" and t.text in BASE_KEYWORDS:
            self.advance()
            return BASE_KEYWORDS[t.text]
        if t.kind == "atom":
            self.advance()
            return T.singleton_atom(t.text[1:])
        if t.kind == "int" or self.at("-"):
            return T.singleton_int(self.int_literal())
        self.error("expected a base type (int, float, atom, pair, fun or a singleton)")


def _tuple_texpr(items):
    nested = items[-1]
    for it in reversed(items[:-1]):
        nested = TProd(it, nested)
    if len(items) == 2:
        return nested
    return TProd(TBase(T.singleton_int(len(items))), nested)


def _tuple_build(items, pair, arity):
    nested = items[-1]
    for it in reversed(items[:-1]):
        nested = pair(it, nested)
    if len(items) == 2:
        return nested
    return pair(arity(len(items)), nested)


def _list_build(items, tail, pair, nil):
    out = nil if tail is None else tail
    for it in reversed(items):
        out = pair(it, out)
    return out


# ----------------------------------------------------- resolution + renaming

class _Renamer:
    """Resolves annotations to type schemes and renames every local binder
    so that all binders in the module are distinct."""

    def __init__(self, types: T.TypeConstructors, reserved):
        self.types = types
        self.used = set(reserved)
        self.counts: dict = {}

    def fresh_name(self, x: str) -> str:
        if x not in self.used:
            self.used.add(x)
            return x
        base = x.split("@")[0]
        n = self.counts.get(base, 1)
        while True:
            n += 1
            cand = f"{base}@{n}"
            if cand not in self.used:
                break
        self.counts[base] = n
        self.used.add(cand)
        return cand

    def scheme(self, s: Optional[SchemeExpr]) -> Optional[TypeScheme]:
        if s is None:
            return None
        env = {q: T.fresh_var(q) for q in s.quantified}
        open_vars: dict = {}
        body = self.types.resolve(s.body, env, open_vars)
        # free variables stay free; the checker reports them
        return TypeScheme(frozenset(v.args[0] for v in env.values()), body)

    def expr(self, e: Expr, scope: dict) -> Expr:
        if isinstance(e, Var):
            return Var(scope.get(e.name, e.name))
        if isinstance(e, Const):
            return e
        if isinstance(e, Abs):
            x = self.fresh_name(e.param)
            return Abs(x, self.expr(e.body, {**scope, e.param: x}))
        if isinstance(e, App):
            return App(self.expr(e.fn, scope), self.expr(e.arg, scope))
        if isinstance(e, Pair):
            return Pair(self.expr(e.left, scope), self.expr(e.right, scope))
        if isinstance(e, Case):
            scrut = self.expr(e.scrutinee, scope)
            clauses = []
            for c in e.clauses:
                inner = dict(scope)
                p = self.pattern(c.guarded_pattern.pattern, inner, {})
                g = self.guard(c.guarded_pattern.guard, inner)
                clauses.append(Clause(GuardedPattern(p, g), self.expr(c.body, inner), c.loc))
            return Case(scrut, tuple(clauses), e.loc)
        if isinstance(e, Letrec):
            inner = dict(scope)
            names = {}
            for d in e.defs:
                names[d.name] = self.fresh_name(d.name)
            inner.update(names)
            defs = tuple(Definition(names[d.name], self.scheme(d.annotation),
                                    self.expr(d.rhs, inner), d.loc) for d in e.defs)
            return Letrec(defs, self.expr(e.body, inner))
        raise TypeError(e)

    def pattern(self, p, scope: dict, seen: dict):
        if isinstance(p, PVar):
            if p.name not in seen:
                seen[p.name] = self.fresh_name(p.name)
                scope[p.name] = seen[p.name]
            return PVar(seen[p.name])
        if isinstance(p, PPair):
            return PPair(self.pattern(p.left, scope, seen), self.pattern(p.right, scope, seen))
        return p

    def guard(self, g, scope: dict):
        if isinstance(g, Is):
            return Is(g.base, scope.get(g.subject, g.subject))
        if isinstance(g, And):
            return And(self.guard(g.left, scope), self.guard(g.right, scope))
        return g


def parse(text: str, path: str = "<input>") -> Module:
    """Parse, declare types, resolve annotations and alpha-rename a program.

    Raises ParseError for syntax errors and TypeDeclError (NonRegular,
    NonContractive, UnknownName) for invalid type declarations."""
    p = Parser(text, path)
    decls, defs, main, main_ann, main_loc = p.program()
    names = [d.name for d in defs]
    for d in defs:
        if names.count(d.name) > 1:
            raise ParseError(f"definition {d.name} appears twice", d.loc)
    types = T.declare(decls)
    rn = _Renamer(types, names)
    top = {n: n for n in names}
    new_defs = tuple(Definition(d.name, rn.scheme(d.annotation), rn.expr(d.rhs, top), d.loc)
                     for d in defs)
    new_main = rn.expr(main, top) if main is not None else None
    main_scheme = rn.scheme(main_ann)
    return Module(tuple(decls), new_defs, new_main, main_scheme, main_loc or Loc(0, 0),
                  types, path)


def parse_type(text: str, types: Optional[T.TypeConstructors] = None, env=None):
    """Parse a single type. Undeclared names become type variables, shared
    through `env` (a dict name -> type) when given."""
    p = Parser(text)
    te = p.type_()
    if p.tok.kind != "eof":
        p.error("unexpected input after type")
    types = types or T.PRELUDE
    env = {} if env is None else env
    return types.resolve(te, {}, env)


def parse_type_file(text: str):
    """A `.tys` file: type declarations only. Returns the constructors."""
    p = Parser(text)
    decls, defs, main, _, _ = p.program()
    if defs or main is not None:
        raise ParseError("type files may only contain type declarations", defs[0].loc if defs else Loc(1, 1))
    return T.declare(decls)
