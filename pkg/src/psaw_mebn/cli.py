"""``psaw-mebn`` command line: validate, ground and query MEBN theories.

Exit codes: 0 success, 1 validation errors, 2 parse errors,
3 grounding or inference errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Sequence

from .core import BUILTIN_PROFILES, ConformanceProfile, MTheory, WorldModel
from .diagnostics import Diagnostic, GroundingError, InferenceError, MebnError, OracleError, ParseError
from .dsl import parse_ground_atom, parse_profile, parse_theory, parse_world
from .grounding import SSBN, build_ssbn, export_dot, export_json
from .inference import posterior
from .validator import ValidationReport, validate_all

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_RUNTIME = 3


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        raise _Exit(EXIT_PARSE) from None


def _report_parse(exc: ParseError) -> None:
    for d in exc.diagnostics:
        print(d, file=sys.stderr)


def _load_profile(name_or_path: str) -> ConformanceProfile:
    if name_or_path in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[name_or_path]
    try:
        return parse_profile(_read(name_or_path), name_or_path)
    except ParseError as exc:
        _report_parse(exc)
        raise _Exit(EXIT_PARSE) from None


def _load_theory(path: str) -> MTheory:
    try:
        return parse_theory(_read(path), path)
    except ParseError as exc:
        _report_parse(exc)
        raise _Exit(EXIT_PARSE) from None


def _load_world(path: str, theory: MTheory) -> WorldModel:
    try:
        return parse_world(_read(path), theory, path)
    except ParseError as exc:
        _report_parse(exc)
        raise _Exit(EXIT_PARSE) from None


def _print_diagnostics(diagnostics: Sequence[Diagnostic], as_json: bool, stream=None) -> None:
    stream = stream or sys.stdout
    if as_json:
        print(json.dumps([d.to_dict() for d in diagnostics], indent=2), file=stream)
    else:
        for d in diagnostics:
            print(d, file=stream)


def _validated(args, theory: MTheory) -> ValidationReport:
    report = validate_all(theory, _load_profile(args.profile), strict=args.strict)
    if not report.passed:
        _print_diagnostics(report.diagnostics, False, sys.stderr)
        raise _Exit(EXIT_INVALID)
    return report


def cmd_validate(args) -> int:
    theory = _load_theory(args.theory)
    report = validate_all(theory, _load_profile(args.profile), strict=args.strict)
    _print_diagnostics(report.diagnostics, args.json)
    if not args.json:
        status = "ok" if report.passed else "FAILED"
        print(f"{args.theory}: {status} ({len(report.errors)} errors, {len(report.diagnostics) - len(report.errors)} warnings)")
    return EXIT_OK if report.passed else EXIT_INVALID


def _ground(theory: MTheory, world: WorldModel) -> SSBN:
    try:
        return build_ssbn(theory, world)
    except GroundingError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        raise _Exit(EXIT_RUNTIME) from None


def cmd_ground(args) -> int:
    theory = _load_theory(args.theory)
    world = _load_world(args.world, theory)
    _validated(args, theory)
    ssbn = _ground(theory, world)
    if args.out:
        Path(args.out).write_bytes(export_json(ssbn))
    if args.dot:
        Path(args.dot).write_bytes(export_dot(ssbn))
    print(f"{len(ssbn.nodes)} nodes, {len(ssbn.edges)} edges")
    return EXIT_OK


def cmd_query(args) -> int:
    theory = _load_theory(args.theory)
    world = _load_world(args.world, theory)
    _validated(args, theory)
    if args.target:
        try:
            targets = tuple(parse_ground_atom(t) for t in args.target)
        except ParseError as exc:
            _report_parse(exc)
            raise _Exit(EXIT_PARSE) from None
        world = dataclasses.replace(world, queries=targets)
    ssbn = _ground(theory, world)
    try:
        results = [posterior(ssbn, str(q), engine=args.engine) for q in world.queries]
    except (InferenceError, OracleError) as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        raise _Exit(EXIT_RUNTIME) from None
    if args.json:
        print(json.dumps([r.to_dict() for r in results], indent=2))
    else:
        for r in results:
            print(r.format())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psaw-mebn", description="Validate, ground and query MEBN theories.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--profile", default="psaw", help="built-in profile name (psaw, msaw) or profile file")
        p.add_argument("--strict", action="store_true", help="treat warnings as errors")

    p = sub.add_parser("validate", help="check a theory against the MEBN rules and a conformance profile")
    p.add_argument("theory")
    common(p)
    p.add_argument("--json", action="store_true", help="print diagnostics as a JSON array")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ground", help="build the situation-specific network for a world")
    p.add_argument("theory")
    p.add_argument("world")
    p.add_argument("--out", help="write the network as JSON")
    p.add_argument("--dot", help="write the network as Graphviz DOT")
    common(p)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("query", help="print posterior marginals")
    p.add_argument("theory")
    p.add_argument("world")
    p.add_argument("--target", action="append", help="ground atom to query, e.g. 'Speed(tr1,t1)'; repeatable")
    p.add_argument("--engine", choices=("ve", "enum"), default="ve", help="variable elimination or full enumeration")
    p.add_argument("--json", action="store_true", help="print posteriors as JSON")
    common(p)
    p.set_defaults(func=cmd_query)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code
    except MebnError as exc:
        # e.g. a query target that is not a node of the grounded network
        print(f"error[{exc.code or 'ERROR'}]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
