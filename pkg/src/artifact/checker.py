"""Whole-program checking: builds the top-level environment, checks every
annotated definition against each arrow of its intersection type and turns
failures into located diagnostics."""
from __future__ import annotations

import json
import sys
import threading
from dataclasses import dataclass, field
from typing import Optional

from . import typecore as T
from .constraints import (DefC, FreshSource, GenOptions, OpenAnnotation, UnboundVariable,
                          annotation_arrows, gen_expr, gen_def, generalize, rewrite, subst_env,
                          _dedupe, _gen)
from .patterns import mono
from .subtyping import simplify
from .syntax import Definition, Loc, Module, NOLOC, free_vars
from .tally import CASE_ORDER, DEFAULT_CAP, LET_ORDER, ResourceLimit, iter_tally
from .typecore import Ty, TypeScheme

ERROR, WARNING = "error", "warning"

STACK_SIZE = 512 * 1024 * 1024


def run_deep(fn, *args, **kwargs):
    """Run fn in a thread with a large stack; deep recursive types and long
    lists need far more than the default C stack."""
    box: dict = {}

    def target():
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    old = threading.stack_size()
    threading.stack_size(STACK_SIZE)
    try:
        t = threading.Thread(target=target)
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    if "error" in box:
        raise box["error"]
    return box.get("value")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    loc: Loc
    message: str

    def render(self, path: str) -> str:
        return f"{path}:{self.loc.line}:{self.loc.col}: {self.severity}[{self.code}]: {self.message}"

    def to_json(self, path: str) -> str:
        return json.dumps({"severity": self.severity, "code": self.code, "file": path,
                           "line": self.loc.line, "col": self.loc.col, "message": self.message})


class UnknownDefinition(Exception):
    pass


@dataclass
class CaseReport:
    case_id: int
    loc: Loc
    inputs: tuple
    live: tuple
    output: Ty

    def render(self) -> str:
        ins = ", ".join(T.show(simplify(t)) for t in self.inputs)
        return f"case at {self.loc}: inputs [{ins}] output {T.show(simplify(self.output))}"


@dataclass
class MemberResult:
    """Outcome of checking one arrow member of an annotated definition."""
    index: int
    domain: Ty
    codomain: Ty
    ok: bool
    theta: Optional[dict] = None
    records: tuple = ()
    candidates: int = 0

    @property
    def arrow(self) -> Ty:
        return T.arrow(self.domain, self.codomain)

    def cases(self) -> list:
        th = self.theta or {}
        return [CaseReport(r.case_id, r.loc,
                           tuple(T.apply_subst(t, th) for t in r.inputs), r.live,
                           T.apply_subst(r.result, th))
                for r in self.records]


@dataclass
class DefResult:
    name: str
    members: list = field(default_factory=list)
    ok: bool = True


class _Failure(Exception):
    def __init__(self, diag: Diagnostic):
        super().__init__(diag.message)
        self.diag = diag


class Checker:
    def __init__(self, m: Module, cap: int = 1000, tally_cap: int = DEFAULT_CAP):
        self.m = m
        self.cap = cap
        self.tally_cap = tally_cap
        self.fresh = FreshSource()
        self.diagnostics: list = []
        self.results: dict = {}
        self.env: dict = {}

    # ------------------------------------------------------------ helpers
    def error(self, code, loc, msg):
        self.diagnostics.append(Diagnostic(ERROR, code, loc, msg))

    def warn(self, code, loc, msg):
        self.diagnostics.append(Diagnostic(WARNING, code, loc, msg))

    def _solve(self, env, cs, fixed, order, existence=True):
        """First (theta, records, candidates) for structured constraints cs.

        Only the existence of a solution matters for a definition's verdict,
        so by default the final tally may simplify by polarity."""
        n = 0
        for D, records in rewrite(env, cs, self.fresh, self.cap):
            n += 1
            for theta in iter_tally(fixed, D, order, self.tally_cap, existence):
                return theta, records, n
        return None, (), n

    def _guarded(self, loc, fn):
        try:
            return fn()
        except UnboundVariable as exc:
            raise _Failure(Diagnostic(ERROR, "unbound-variable", loc, str(exc)))
        except ResourceLimit as exc:
            raise _Failure(Diagnostic(ERROR, "resource-limit", loc, str(exc)))
        except OpenAnnotation as exc:
            raise _Failure(Diagnostic(ERROR, "open-annotation", exc.loc, str(exc)))

    # ------------------------------------------------------- environment
    def build_env(self):
        defs = self.m.defs
        for d in defs:
            if d.annotation is None:
                continue
            if T.free_tyvars(d.annotation):
                names = sorted(v.name for v in T.free_tyvars(d.annotation))
                self.error("open-annotation", d.loc,
                           f"annotation of {d.name} has free type variables: {', '.join(names)}")
            elif annotation_arrows(d.annotation) is None:
                self.error("bad-annotation", d.loc,
                           f"annotation of {d.name} is not an intersection of arrow types")
            self.env[d.name] = d.annotation
        unannotated = [d for d in defs if d.annotation is None]
        for group in _def_sccs(unannotated):
            self._infer_group(group)

    def _infer_group(self, group: list):
        env = dict(self.env)
        cs = []
        local = {}
        opts = GenOptions()
        for d in group:
            c, g = gen_def(d, self.fresh, opts)
            cs.extend(c)
            local.update(g)
        env.update(local)
        names = ", ".join(d.name for d in group)
        try:
            theta, records, n = self._guarded(group[0].loc, lambda: self._solve(
                env, _dedupe(cs), T.free_tyvars(self.env), LET_ORDER, existence=False))
        except _Failure as f:
            self.diagnostics.append(f.diag)
            theta = None
        else:
            if theta is None:
                self.error("type-mismatch", group[0].loc, f"no type can be inferred for {names}")
        if theta is None:
            for d in group:
                self.env[d.name] = mono(T.BOT)
                self.results[d.name] = DefResult(d.name, [], False)
            return
        self.env.update(generalize(self.env, subst_env(local, theta)))
        for d in group:
            self.results[d.name] = DefResult(d.name, [MemberResult(
                0, T.BOT, T.BOT, True, theta, tuple(records), n)])

    # ----------------------------------------------------------- members
    def member_constraints(self, d: Definition, dom: Ty, cod: Ty, opts: GenOptions) -> tuple:
        return (DefC({d.rhs.param: mono(dom)}, _dedupe(_gen(d.rhs.body, cod, self.fresh, opts))),)

    def check_member(self, d: Definition, i: int, dom: Ty, cod: Ty) -> MemberResult:
        fixed = frozenset(d.annotation.quantified)
        opts = GenOptions()
        cs = self.member_constraints(d, dom, cod, opts)
        theta, records, n = self._guarded(d.loc, lambda: self._solve(self.env, cs, fixed, CASE_ORDER))
        res = MemberResult(i, dom, cod, theta is not None, theta, records, n)
        if theta is None:
            raise _Failure(self._diagnose(d, dom, cod, fixed, opts))
        return res

    def _diagnose(self, d, dom, cod, fixed, opts) -> Diagnostic:
        arrow = T.show(T.arrow(dom, cod))
        ids = sorted(opts.cases)
        mismatch = Diagnostic(ERROR, "type-mismatch", d.loc,
                              f"{d.name} does not have type {arrow}")
        if not ids:
            return mismatch

        def passes(skip) -> bool:
            o = GenOptions(skip_exhaustive=frozenset(skip))
            cs = self.member_constraints(d, dom, cod, o)
            try:
                theta, _, _ = self._solve(self.env, cs, fixed, CASE_ORDER)
            except (ResourceLimit, UnboundVariable):
                return False
            return theta is not None

        try:
            if not passes(ids):
                return mismatch
        except ResourceLimit:
            return mismatch
        for cid in ids:
            if passes([cid]):
                case = opts.cases[cid]
                return Diagnostic(ERROR, "non-exhaustive", case.loc,
                                  f"case in {d.name} does not cover all values when checking {arrow}")
        case = opts.cases[ids[0]]
        return Diagnostic(ERROR, "non-exhaustive", case.loc,
                          f"cases in {d.name} do not cover all values when checking {arrow}")

    def check_def(self, d: Definition) -> DefResult:
        result = DefResult(d.name)
        arrows = annotation_arrows(d.annotation)
        for i, (dom, cod) in enumerate(arrows):
            try:
                result.members.append(self.check_member(d, i, dom, cod))
            except _Failure as f:
                self.diagnostics.append(f.diag)
                result.ok = False
                result.members.append(MemberResult(i, dom, cod, False))
        self.results[d.name] = result
        return result

    def check_main(self):
        m = self.m
        loc = m.main_loc
        ann = m.main_annotation
        if ann is not None and T.free_tyvars(ann):
            names = sorted(v.name for v in T.free_tyvars(ann))
            self.error("open-annotation", loc, f"annotation of main has free type variables: {', '.join(names)}")
            return
        t = ann.body if ann is not None else self.fresh("main")
        opts = GenOptions()
        try:
            cs = gen_expr(m.main, t, self.fresh, opts)
            theta, records, n = self._guarded(loc, lambda: self._solve(self.env, cs, frozenset(), CASE_ORDER))
        except _Failure as f:
            self.diagnostics.append(f.diag)
            self.results["main"] = DefResult("main", [], False)
            return
        if theta is None:
            msg = f"main does not have type {T.show(t)}" if ann is not None else "main has no type"
            self.error("type-mismatch", loc, msg)
            self.results["main"] = DefResult("main", [], False)
            return
        self.results["main"] = DefResult("main", [MemberResult(0, T.BOT, t, True, theta, records, n)])

    # -------------------------------------------------------------- report
    def dead_branch_warnings(self):
        defs = {d.name: d for d in self.m.defs}
        for name, res in self.results.items():
            oks = [mr for mr in res.members if mr.ok]
            if not res.ok or not oks:
                continue
            seen: dict = {}
            for mr in oks:
                for r in mr.records:
                    acc = seen.setdefault(r.case_id, [r.loc, [False] * len(r.live)])
                    acc[1] = [a or b for a, b in zip(acc[1], r.live)]
            for cid in sorted(seen):
                loc, live = seen[cid]
                case = _find_case(defs.get(name), self.m, name, loc)
                for j, alive in enumerate(live):
                    if alive:
                        continue
                    cloc = case.clauses[j].loc if case is not None else loc
                    self.warn("dead-branch", cloc,
                              f"branch {j + 1} of this case in {name} can never be taken")

    def run(self) -> list:
        self.build_env()
        for d in self.m.defs:
            if d.annotation is not None and d.name not in {r for r in self._bad_annotations()}:
                self.check_def(d)
        if self.m.main is not None:
            self.check_main()
        self.dead_branch_warnings()
        return sorted(self.diagnostics, key=lambda x: (x.loc.line, x.loc.col, x.severity, x.code))

    def _bad_annotations(self):
        for d in self.m.defs:
            if d.annotation is not None and (T.free_tyvars(d.annotation)
                                             or annotation_arrows(d.annotation) is None):
                yield d.name


def _find_case(d, m, name, loc):
    from .syntax import Case
    roots = [d.rhs] if d is not None else ([m.main] if name == "main" and m.main is not None else [])
    stack = list(roots)
    while stack:
        e = stack.pop()
        if isinstance(e, Case) and e.loc == loc:
            return e
        stack.extend(_children(e))
    return None


def _children(e):
    from .syntax import Abs, App, Case, Letrec, Pair
    if isinstance(e, Abs):
        return [e.body]
    if isinstance(e, App):
        return [e.fn, e.arg]
    if isinstance(e, Pair):
        return [e.left, e.right]
    if isinstance(e, Case):
        return [e.scrutinee] + [c.body for c in e.clauses]
    if isinstance(e, Letrec):
        return [d.rhs for d in e.defs] + [e.body]
    return []


def _def_sccs(defs: list) -> list:
    """Strongly connected components of unannotated definitions, dependencies first."""
    names = {d.name: d for d in defs}
    graph = {d.name: sorted(free_vars(d.rhs) & names.keys()) for d in defs}
    comps = T._sccs(graph)
    return [[names[n] for n in sorted(c, key=list(names).index)] for c in comps]


def check_module(m: Module, cap: int = 1000) -> list:
    """Diagnostics for a parsed module (errors and warnings)."""
    return run_deep(lambda: Checker(m, cap).run())


def check_with_results(m: Module, cap: int = 1000):
    def go():
        c = Checker(m, cap)
        diags = c.run()
        return diags, c
    return run_deep(go)


def branch_report(m: Module, def_name: str) -> list:
    """Per intersection member: the case reports (branch input types and the
    output type) computed while checking def_name."""
    d = next((d for d in m.defs if d.name == def_name), None)
    if d is None:
        raise UnknownDefinition(f"no definition named {def_name}")
    if d.annotation is None:
        raise UnknownDefinition(f"{def_name} has no annotation")

    def go():
        c = Checker(m)
        c.build_env()
        res = c.check_def(d)
        return [(mr, mr.cases()) for mr in res.members]
    return run_deep(go)


sys.setrecursionlimit(max(sys.getrecursionlimit(), 60000))
