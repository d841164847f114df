"""Command line interface: `minerl check|eval|subtype|branches|oracle|fmt`.

Exit codes: 0 success, 1 type errors (or a failed evaluation), 2 usage,
file or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import typecore as T
from .checker import ERROR, Diagnostic, UnknownDefinition, branch_report, check_module, run_deep
from .finite_model import Universe, UnsupportedType, subtype_oracle
from .interpreter import OracleSource, OutOfFuel, Stuck, eval_module
from .parser import ParseError, parse, parse_type, parse_type_file
from .pretty import expr as show_expr, module as show_module
from .subtyping import is_subtype
from .syntax import Loc
from .typecore import TypeDeclError
from .values import Value, show_value

EXIT_OK, EXIT_ERRORS, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _emit(diags, path, as_json, out):
    for d in diags:
        print(d.to_json(path) if as_json else d.render(path), file=out)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}")


def _load(path: str, as_json: bool, out):
    """Parse a program; on failure print one diagnostic and return the exit code."""
    text = _read(path)
    try:
        return parse(text, path), None
    except ParseError as exc:
        _emit([Diagnostic(ERROR, exc.code, exc.loc, exc.message)], path, as_json, out)
        return None, EXIT_USAGE
    except TypeDeclError as exc:
        loc = exc.loc or Loc(1, 1)
        _emit([Diagnostic(ERROR, exc.code, loc, exc.message)], path, as_json, out)
        return None, EXIT_ERRORS


def cmd_check(args, out) -> int:
    m, code = _load(args.file, args.json, out)
    if m is None:
        return code
    diags = check_module(m, cap=args.cap)
    _emit(diags, args.file, args.json, out)
    return EXIT_ERRORS if any(d.severity == ERROR for d in diags) else EXIT_OK


def cmd_eval(args, out) -> int:
    m, code = _load(args.file, args.json, out)
    if m is None:
        return code
    if m.main is None:
        raise _Usage(f"{args.file} has no main expression")
    r = eval_module(m, args.fuel, OracleSource(args.seed))
    if isinstance(r, Value):
        print(show_value(r), file=out)
        return EXIT_OK
    if isinstance(r, OutOfFuel):
        print(f"out of fuel after {r.steps} steps", file=out)
    elif isinstance(r, Stuck):
        print(f"stuck at {_show_runtime(r.at)}", file=out)
    return EXIT_ERRORS


def _show_runtime(e) -> str:
    try:
        return show_expr(e)
    except TypeError:
        return type(e).__name__


def _types_and_pair(args):
    types = parse_type_file(_read(args.file))
    env: dict = {}
    s = parse_type(args.s, types, env)
    t = parse_type(args.t, types, env)
    return s, t


def cmd_subtype(args, out) -> int:
    s, t = _types_and_pair(args)
    print("true" if run_deep(is_subtype, s, t) else "false", file=out)
    return EXIT_OK


def _csv(text: str, conv=str) -> frozenset:
    items = [x.strip() for x in text.split(",") if x.strip()]
    try:
        return frozenset(conv(x.lstrip("'")) if conv is str else conv(x) for x in items)
    except ValueError:
        raise _Usage(f"bad list {text!r}")


def cmd_oracle(args, out) -> int:
    s, t = _types_and_pair(args)
    try:
        u = Universe(_csv(args.atoms), _csv(args.ints, int), args.float, args.depth)
    except ValueError as exc:
        raise _Usage(str(exc))
    try:
        verdict = run_deep(subtype_oracle, s, t, u)
    except UnsupportedType as exc:
        raise _Usage(f"the finite model cannot decide this: {exc}")
    print("true" if verdict else "false", file=out)
    return EXIT_OK


def cmd_branches(args, out) -> int:
    m, code = _load(args.file, args.json, out)
    if m is None:
        return code
    try:
        report = branch_report(m, args.name)
    except UnknownDefinition as exc:
        raise _Usage(str(exc))
    ok = True
    for mr, cases in report:
        status = "ok" if mr.ok else "fails"
        if args.json:
            print(json.dumps({"member": mr.index + 1, "type": T.show(mr.arrow), "ok": mr.ok,
                              "cases": [{"line": c.loc.line, "col": c.loc.col,
                                         "inputs": [T.show(_simple(x)) for x in c.inputs],
                                         "output": T.show(_simple(c.output))} for c in cases]}),
                  file=out)
        else:
            print(f"member {mr.index + 1}: {T.show(mr.arrow)} ({status})", file=out)
            for c in cases:
                print(f"  {c.render()}", file=out)
        ok = ok and mr.ok
    return EXIT_OK if ok else EXIT_ERRORS


def _simple(t):
    from .subtyping import simplify
    return run_deep(simplify, t)


def cmd_fmt(args, out) -> int:
    m, code = _load(args.file, args.json, out)
    if m is None:
        return code
    out.write(show_module(m))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="print diagnostics as one JSON object per line")
    p = argparse.ArgumentParser(prog="minerl", description="Set-theoretic type checker for MinErl.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="type-check a program")
    c.add_argument("file")
    c.add_argument("--cap", type=int, default=1000,
                   help="local solutions explored per definition before giving up")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("eval", parents=[common], help="evaluate the main expression")
    e.add_argument("file")
    e.add_argument("--fuel", type=int, default=1_000_000)
    e.add_argument("--seed", type=int, default=0, help="seed of the oracle stream")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("subtype", parents=[common], help="decide S <= T")
    s.add_argument("file", help="type declarations (.tys)")
    s.add_argument("s")
    s.add_argument("t")
    s.set_defaults(func=cmd_subtype)

    b = sub.add_parser("branches", parents=[common],
                       help="show branch input types of an annotated definition")
    b.add_argument("file")
    b.add_argument("name")
    b.set_defaults(func=cmd_branches)

    o = sub.add_parser("oracle", parents=[common], help="decide S <= T in a finite model")
    o.add_argument("file", help="type declarations (.tys)")
    o.add_argument("s")
    o.add_argument("t")
    o.add_argument("--atoms", default="a,b,nil", help="comma-separated atom names")
    o.add_argument("--ints", default="0,1,2,3", help="comma-separated integers")
    o.add_argument("--depth", type=int, default=2, help="maximum pair nesting")
    o.add_argument("--float", action="store_true", help="include a float value")
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("fmt", parents=[common], help="print the desugared program")
    f.add_argument("file")
    f.set_defaults(func=cmd_fmt)
    return p


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except _Usage as exc:
        print(f"minerl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, TypeDeclError) as exc:
        loc = getattr(exc, "loc", None) or Loc(1, 1)
        print(f"minerl: {loc}: {getattr(exc, 'message', exc)}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
