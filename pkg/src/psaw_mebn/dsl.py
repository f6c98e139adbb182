"""Text formats: MTheories (.pmt), worlds (.pw) and conformance profiles.

Hand-written tokenizer plus recursive-descent parsers. A syntax error stops the
parse (PARSE-1); semantic problems are collected so one run reports all of them:

    PARSE-1  syntax error or malformed declaration
    PARSE-2  duplicate declaration
    PARSE-3  distribution of wrong length or not normalized
    PARSE-4  unknown type / ov / template / state reference, or type mismatch
    WORLD-1  evidence or query on a CTX template, or fact on a stochastic one
    WORLD-2  arity or entity-type mismatch in a ground atom
    WORLD-3  evidence state not among the template's states
    WORLD-4  Predecessor asserted as a fact (it is derived from time order)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .core import (
    BOOLEAN_STATES,
    CTX,
    PREDECESSOR,
    Atom,
    ConformanceProfile,
    ContextConstraint,
    EntityInstance,
    EntityKind,
    EntityType,
    InputNode,
    LocalDistribution,
    MFrag,
    MFragGroup,
    MTheory,
    OrdinaryVariable,
    Quantifier,
    RequiredContext,
    ResidentNode,
    Rule,
    RVTemplate,
    WorldModel,
    is_normalized,
)
from .diagnostics import Diagnostic, ParseError, SourceSpan, error

_TOKEN_RE = re.compile(
    r"""
    (?P<newline>\n)
  | (?P<space>[ \t\r\f]+)
  | (?P<comment>//[^\n]*)
  | (?P<number>[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>->|==|[{}(),;:=])
    """,
    re.VERBOSE,
)

_REQUIRE_RULES = {"observer_of": "CONF-OBS", "actual_object": "CONF-ACT", "predecessor": "CONF-PRED"}
_REQUIRE_NAMES = {v: k for k, v in _REQUIRE_RULES.items()}


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | op | eof
    value: str
    span: SourceSpan


class _SyntaxError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def tokenize(text: str, path: str = "<string>") -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(path, line, pos - line_start + 1)
        if m is None:
            raise _SyntaxError(error("PARSE-1", f"unexpected character {text[pos]!r}", span))
        kind = m.lastgroup
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind in ("ident", "number", "op"):
            tokens.append(Token(kind, m.group(), span))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(path, line, pos - line_start + 1)))
    return tokens


class _Parser:
    """Token cursor shared by the theory, world and profile grammars."""

    def __init__(self, text: str, path: str):
        self.path = path
        self.tokens = tokenize(text, path)
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, value: str) -> bool:
        return self.tok.kind in ("ident", "op") and self.tok.value == value

    def fail(self, expected: str):
        got = "end of input" if self.tok.kind == "eof" else repr(self.tok.value)
        raise _SyntaxError(error("PARSE-1", f"expected {expected}, got {got}", self.tok.span))

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(repr(value))
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.pos += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            self.fail(what)
        return self.advance()

    def number(self) -> float:
        if self.tok.kind != "number":
            self.fail("number")
        return float(self.advance().value)

    def report(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(error(code, message, span))

    def comma_list(self, item: Callable[[], Token]) -> list[Token]:
        out = [item()]
        while self.accept(","):
            out.append(item())
        return out

    def atom(self) -> tuple[Atom, SourceSpan]:
        name = self.ident("atom name")
        self.expect("(")
        args = self.comma_list(self.ident)
        self.expect(")")
        return Atom(name.value, tuple(a.value for a in args)), name.span

    def end(self) -> None:
        if self.tok.kind != "eof":
            self.fail("end of input")


def _run(parse: Callable[[_Parser], object], text: str, path: str):
    try:
        parser = _Parser(text, path)
        result = parse(parser)
    except _SyntaxError as exc:
        raise ParseError([exc.diagnostic]) from None
    if any(d.is_error for d in parser.diagnostics):
        raise ParseError(parser.diagnostics)
    return result


# --- theory ------------------------------------------------------------------


def parse_theory(text: str, path: str = "<string>") -> MTheory:
    """Parse ``.pmt`` source; raises ``ParseError`` carrying every diagnostic."""
    return _run(_theory, text, path)


def _theory(p: _Parser) -> MTheory:
    start = p.expect("mtheory")
    name = p.ident("theory name").value
    p.expect("{")
    entities: dict[str, EntityType] = {}
    while p.at("entity"):
        et = _entity(p)
        if et.name in entities:
            p.report("PARSE-2", f"duplicate entity type {et.name}", et.span)
        else:
            entities[et.name] = et
    mfrags: dict[str, MFrag] = {}
    while p.at("mfrag"):
        mfrag = _mfrag(p, entities)
        if mfrag.name in mfrags:
            p.report("PARSE-2", f"duplicate MFrag {mfrag.name}", mfrag.span)
        else:
            mfrags[mfrag.name] = mfrag
    if not p.at("}"):
        p.fail("'entity', 'mfrag' or '}'")
    p.advance()
    p.end()
    theory = MTheory(name, tuple(entities.values()), tuple(mfrags.values()), span=start.span)
    _resolve_references(p, theory)
    return theory


def _entity(p: _Parser) -> EntityType:
    start = p.expect("entity")
    name = p.ident("entity type name").value
    ordered = p.accept("ordered")
    kind = EntityKind.TIME if ordered else EntityKind.OTHER
    if p.accept("kind"):
        tok = p.ident("entity kind")
        try:
            kind = EntityKind(tok.value)
        except ValueError:
            p.fail("one of " + ", ".join(k.value for k in EntityKind))
        if ordered and kind is not EntityKind.TIME:
            p.report("PARSE-1", f"only time entity types may be ordered ({name} is {kind.value})", tok.span)
    p.expect(";")
    return EntityType(name, kind, ordered, span=start.span)


def _mfrag(p: _Parser, entities: dict[str, EntityType]) -> MFrag:
    start = p.expect("mfrag")
    name = p.ident("MFrag name").value
    group = None
    if p.accept("group"):
        tok = p.ident("MFrag group")
        try:
            group = MFragGroup(tok.value)
        except ValueError:
            p.fail("one of " + ", ".join(g.value for g in MFragGroup))
    p.expect("{")

    ovs: dict[str, OrdinaryVariable] = {}
    while p.at("ov"):
        tok = p.advance()
        ov_name = p.ident("ordinary variable").value
        p.expect(":")
        type_tok = p.ident("entity type")
        p.expect(";")
        if type_tok.value not in entities:
            p.report("PARSE-4", f"unknown entity type {type_tok.value}", type_tok.span)
        if ov_name in ovs:
            p.report("PARSE-2", f"duplicate ordinary variable {ov_name} in MFrag {name}", tok.span)
        else:
            ovs[ov_name] = OrdinaryVariable(ov_name, type_tok.value, span=tok.span)

    def check_ovs(args, span):
        for arg in args:
            if arg not in ovs:
                p.report("PARSE-4", f"unknown ordinary variable {arg} in MFrag {name}", span)

    contexts = []
    while p.at("context"):
        tok = p.advance()
        equals = None
        if p.peek().value == "=":
            equals = p.ident("ordinary variable").value
            p.expect("=")
        atom, span = p.atom()
        p.expect(";")
        check_ovs(atom.args + ((equals,) if equals else ()), span)
        contexts.append(ContextConstraint(atom, equals, span=tok.span))

    inputs: dict[Atom, InputNode] = {}
    while p.at("input"):
        tok = p.advance()
        atom, span = p.atom()
        p.expect(";")
        check_ovs(atom.args, span)
        if atom in inputs:
            p.report("PARSE-2", f"duplicate input {atom} in MFrag {name}", tok.span)
        inputs[atom] = InputNode(atom, span=tok.span)

    residents: dict[str, ResidentNode] = {}
    while p.at("resident"):
        res = _resident(p, ovs)
        if res.template.name in residents:
            p.report("PARSE-2", f"duplicate resident {res.template.name} in MFrag {name}", res.span)
        else:
            residents[res.template.name] = res

    if not p.at("}"):
        p.fail("'ov', 'context', 'input', 'resident' or '}' (declarations must appear in that order)")
    p.advance()

    local = set(inputs) | {r.atom for r in residents.values()}
    for res in residents.values():
        for rule in res.lpd.rules if res.lpd else ():
            if rule.parent not in local:
                p.report("PARSE-4", f"rule of {res.atom} references {rule.parent}, which is neither an input nor a resident of MFrag {name}", rule.span)
    return MFrag(
        name,
        group,
        tuple(ovs.values()),
        tuple(contexts),
        tuple(inputs.values()),
        tuple(residents.values()),
        span=start.span,
    )


def _resident(p: _Parser, ovs: dict[str, OrdinaryVariable]) -> ResidentNode:
    start = p.expect("resident")
    atom, atom_span = p.atom()
    for arg in atom.args:
        if arg not in ovs:
            p.report("PARSE-4", f"unknown ordinary variable {arg} in resident {atom.name}", atom_span)
    p.expect(":")
    states_span = p.tok.span
    if p.accept("boolean"):
        states = BOOLEAN_STATES
    else:
        p.expect("{")
        states = tuple(t.value for t in p.comma_list(lambda: p.ident("state label")))
        p.expect("}")
    if len(set(states)) != len(states):
        p.report("PARSE-2", f"duplicate state label in {atom.name}", states_span)
    if len(states) < 2:
        p.report("PARSE-1", f"{atom.name} needs at least two states", states_span)
    kind = None
    if p.accept("kind"):
        kind = p.ident("RV kind").value
    arg_types = tuple(ovs[a].type if a in ovs else "?" for a in atom.args)

    if p.accept("deterministic"):
        p.expect(";")
        if kind is None:
            kind = CTX
        if kind != CTX:
            p.report("PARSE-1", f"deterministic resident {atom.name} must have kind CTX, not {kind}", start.span)
        if states != BOOLEAN_STATES:
            p.report("PARSE-1", f"deterministic resident {atom.name} must be boolean", states_span)
        return ResidentNode(atom, RVTemplate(atom.name, arg_types, states, kind), None, span=start.span)

    if kind == CTX:
        p.report("PARSE-1", f"CTX resident {atom.name} must be declared deterministic", start.span)
    if not p.at("{"):
        p.fail("'deterministic' or '{'")
    p.advance()
    rules = []
    while p.at("if"):
        tok = p.advance()
        q = p.ident("'any' or 'all'")
        if q.value not in ("any", "all"):
            p.fail("'any' or 'all'")
        parent, _ = p.atom()
        p.expect("==")
        state = p.ident("state label").value
        p.expect("->")
        dist = _dist(p, atom.name, len(states))
        p.expect(";")
        rules.append(Rule(Quantifier(q.value), parent, state, dist, span=tok.span))
    if not p.at("default"):
        p.fail("'if' or 'default' (every LPD needs a default)")
    p.advance()
    p.expect("->")
    default = _dist(p, atom.name, len(states))
    p.expect(";")
    p.expect("}")
    lpd = LocalDistribution(tuple(rules), default)
    return ResidentNode(atom, RVTemplate(atom.name, arg_types, states, kind), lpd, span=start.span)


def _dist(p: _Parser, owner: str, n_states: int) -> tuple[float, ...]:
    span = p.expect("(").span
    values = [p.number()]
    while p.accept(","):
        values.append(p.number())
    p.expect(")")
    dist = tuple(values)
    if len(dist) != n_states:
        p.report("PARSE-3", f"distribution for {owner} has {len(dist)} entries, expected {n_states}", span)
    elif not is_normalized(dist):
        p.report("PARSE-3", f"distribution {dist} for {owner} is not a normalized probability vector", span)
    return dist


def _resolve_references(p: _Parser, theory: MTheory) -> None:
    """Cross-MFrag checks against home declarations that do exist.

    Missing homes are left to the validator (UH-2).
    """
    templates = theory.templates()

    def check_args(atom: Atom, arg_types: tuple[str, ...], span) -> None:
        template = templates[atom.name]
        if len(arg_types) != len(template.arg_types):
            p.report("PARSE-4", f"{atom} has {len(arg_types)} arguments, {atom.name} takes {len(template.arg_types)}", span)
        elif arg_types != template.arg_types:
            p.report("PARSE-4", f"{atom} argument types {list(arg_types)} do not match {atom.name}{list(template.arg_types)}", span)

    for mfrag in theory.mfrags:
        types = mfrag.ov_types()
        for ctx in mfrag.contexts:
            rel = ctx.relation
            if rel.name not in templates:
                continue
            if not templates[rel.name].deterministic:
                p.report("PARSE-4", f"context {ctx} references stochastic template {rel.name}; contexts need CTX templates", ctx.span)
                continue
            check_args(rel, tuple(types.get(a, "?") for a in rel.args), ctx.span)
        for inp in mfrag.inputs:
            if inp.atom.name not in templates:
                continue
            if templates[inp.atom.name].deterministic:
                p.report("PARSE-4", f"input {inp.atom} references CTX template {inp.atom.name}; use a context instead", inp.span)
                continue
            check_args(inp.atom, tuple(types.get(a, "?") for a in inp.atom.args), inp.span)
        for res in mfrag.residents:
            for rule in res.lpd.rules if res.lpd else ():
                parent = templates.get(rule.parent.name)
                if parent is not None and rule.state not in parent.states:
                    p.report("PARSE-4", f"rule of {res.atom} compares {rule.parent} with unknown state {rule.state}", rule.span)


def serialize_theory(theory: MTheory) -> str:
    """Canonical ``.pmt`` text; ``parse_theory`` of the result equals ``theory``."""
    lines = [f"mtheory {theory.name} {{"]
    for et in theory.entity_types:
        ordered = " ordered" if et.ordered else ""
        lines.append(f"  entity {et.name}{ordered} kind {et.kind.value};")
    for mfrag in theory.mfrags:
        group = f" group {mfrag.group.value}" if mfrag.group else ""
        lines.append(f"  mfrag {mfrag.name}{group} {{")
        for ov in mfrag.ovs:
            lines.append(f"    ov {ov.name} : {ov.type};")
        for ctx in mfrag.contexts:
            lines.append(f"    context {_fmt_context(ctx)};")
        for inp in mfrag.inputs:
            lines.append(f"    input {_fmt_atom(inp.atom)};")
        for res in mfrag.residents:
            lines.extend(_fmt_resident(res))
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fmt_atom(atom: Atom) -> str:
    return f"{atom.name}({', '.join(atom.args)})"


def _fmt_context(ctx: ContextConstraint) -> str:
    if ctx.equals is None:
        return _fmt_atom(ctx.atom)
    return f"{ctx.equals} = {_fmt_atom(ctx.atom)}"


def _fmt_dist(dist: tuple[float, ...]) -> str:
    return "(" + ", ".join(repr(float(x)) for x in dist) + ")"


def _fmt_resident(res: ResidentNode) -> list[str]:
    t = res.template
    states = "boolean" if t.states == BOOLEAN_STATES else "{" + ", ".join(t.states) + "}"
    kind = f" kind {t.kind}" if t.kind else ""
    head = f"    resident {_fmt_atom(res.atom)} : {states}{kind}"
    if res.lpd is None:
        return [head + " deterministic;"]
    lines = [head + " {"]
    for rule in res.lpd.rules:
        lines.append(
            f"      if {rule.quantifier.value} {_fmt_atom(rule.parent)} == {rule.state} -> {_fmt_dist(rule.dist)};"
        )
    if res.lpd.default is not None:
        lines.append(f"      default -> {_fmt_dist(res.lpd.default)};")
    lines.append("    }")
    return lines


# --- world -------------------------------------------------------------------


def parse_world(text: str, theory: MTheory, path: str = "<string>") -> WorldModel:
    """Parse ``.pw`` source typed against ``theory``."""
    return _run(lambda p: _world(p, theory), text, path)


def _world(p: _Parser, theory: MTheory) -> WorldModel:
    p.expect("world")
    name = p.ident("world name").value
    p.expect("{")
    types = {et.name: et for et in theory.entity_types}
    templates = theory.templates()
    instances: dict[str, EntityInstance] = {}
    ordinals: dict[str, int] = {}
    facts: dict[Atom, None] = {}
    evidence: dict[Atom, str] = {}
    queries: dict[Atom, None] = {}

    def declare(type_name: str, tokens: list[Token]) -> None:
        et = types[type_name]
        for tok in tokens:
            if tok.value in instances:
                p.report("PARSE-2", f"duplicate entity instance {tok.value}", tok.span)
                continue
            ordinal = None
            if et.ordered:
                ordinal = ordinals[type_name] = ordinals.get(type_name, 0) + 1
            instances[tok.value] = EntityInstance(tok.value, type_name, ordinal, span=tok.span)

    def ground(atom: Atom, span: SourceSpan) -> RVTemplate | None:
        template = templates.get(atom.name)
        if template is None:
            p.report("PARSE-4", f"unknown template {atom.name}", span)
            return None
        if len(atom.args) != len(template.arg_types):
            p.report("WORLD-2", f"{atom} has {len(atom.args)} arguments, {atom.name} takes {len(template.arg_types)}", span)
            return template
        for arg, expected in zip(atom.args, template.arg_types):
            inst = instances.get(arg)
            if inst is None:
                p.report("PARSE-4", f"unknown entity instance {arg} in {atom}", span)
            elif inst.type != expected:
                p.report("WORLD-2", f"{arg} is a {inst.type}, {atom.name} expects {expected}", span)
        return template

    while not p.at("}"):
        tok = p.tok
        if tok.kind != "ident":
            p.fail("world item or '}'")
        if tok.value == "time":
            p.advance()
            ordered = sorted(theory.ordered_types())
            names = p.comma_list(lambda: p.ident("time instance"))
            p.expect(";")
            if len(ordered) != 1:
                p.report("PARSE-4", f"'time' needs exactly one ordered entity type, theory has {len(ordered)}", tok.span)
            else:
                declare(ordered[0], names)
        elif tok.value in ("fact", "evidence", "query"):
            p.advance()
            atom, span = p.atom()
            state = None
            if tok.value == "evidence":
                p.expect("=")
                state_tok = p.ident("state label")
                state = state_tok.value
            p.expect(";")
            if tok.value == "query" and atom.name not in templates:
                # a query on a homeless template is reported by grounding (GROUND-1)
                queries[atom] = None
                continue
            template = ground(atom, span)
            if template is None:
                continue
            if tok.value == "fact":
                if atom.name == PREDECESSOR:
                    p.report("WORLD-4", "Predecessor facts are derived from time order and may not be asserted", span)
                elif not template.deterministic:
                    p.report("WORLD-1", f"fact {atom} names stochastic template {atom.name}; use evidence", span)
                elif atom in facts:
                    p.report("PARSE-2", f"duplicate fact {atom}", span)
                facts[atom] = None
            elif template.deterministic:
                p.report("WORLD-1", f"{tok.value} on CTX template {atom.name}; CTX relations take facts", span)
            elif tok.value == "evidence":
                if state not in template.states:
                    p.report("WORLD-3", f"{state} is not a state of {atom.name} {list(template.states)}", state_tok.span)
                if atom in evidence:
                    p.report("PARSE-2", f"duplicate evidence on {atom}", span)
                evidence[atom] = state
            else:
                if atom in queries:
                    p.report("PARSE-2", f"duplicate query {atom}", span)
                queries[atom] = None
        else:
            p.advance()
            names = p.comma_list(lambda: p.ident("entity instance"))
            p.expect(";")
            if tok.value not in types:
                p.report("PARSE-4", f"unknown entity type {tok.value}", tok.span)
            else:
                declare(tok.value, names)
    p.advance()
    p.end()
    return WorldModel(name, tuple(instances.values()), tuple(facts), evidence, tuple(queries))


def serialize_world(world: WorldModel) -> str:
    """Canonical ``.pw`` text; consecutive instances of one type share a line."""
    lines = [f"world {world.name} {{"]
    run: list[EntityInstance] = []
    for inst in (*world.instances, None):
        if run and (inst is None or inst.type != run[0].type):
            lines.append(f"  {run[0].type} {', '.join(i.id for i in run)};")
            run = []
        if inst is not None:
            run.append(inst)
    for fact in world.facts:
        lines.append(f"  fact {_fmt_atom(fact)};")
    for atom, state in world.evidence.items():
        lines.append(f"  evidence {_fmt_atom(atom)} = {state};")
    for atom in world.queries:
        lines.append(f"  query {_fmt_atom(atom)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_ground_atom(text: str) -> Atom:
    """Parse a standalone ground atom such as ``Speed(tr1,t1)``."""

    def atom_only(p: _Parser) -> Atom:
        atom, _ = p.atom()
        p.end()
        return atom

    return _run(atom_only, text, "<atom>")


# --- profiles ----------------------------------------------------------------


def parse_profile(text: str, path: str = "<string>") -> ConformanceProfile:
    """Parse a conformance profile::

        profile psaw {
          kinds OC, RT, TR, SIT;
          edge {OC, TR} -> RT;
          same_kind_recursion true;
          require observer_of OC;
          require actual_object RT from TR;
          require predecessor;
        }
    """
    return _run(_profile, text, path)


def _profile(p: _Parser) -> ConformanceProfile:
    p.expect("profile")
    name = p.ident("profile name").value
    p.expect("{")
    kinds: dict[str, None] = {}
    edges: dict[tuple[str, str], None] = {}
    recursion = True
    required = []

    def kind_list() -> list[str]:
        return [t.value for t in p.comma_list(lambda: p.ident("RV kind"))]

    while not p.at("}"):
        tok = p.tok
        if p.accept("kinds"):
            for k in kind_list():
                kinds[k] = None
        elif p.accept("edge"):
            p.expect("{")
            parents = kind_list()
            p.expect("}")
            p.expect("->")
            child = p.ident("RV kind")
            for parent in parents:
                for kind, span in ((parent, tok.span), (child.value, child.span)):
                    if kind not in kinds:
                        p.report("PARSE-4", f"edge uses undeclared kind {kind}", span)
                edges[(parent, child.value)] = None
        elif p.accept("same_kind_recursion"):
            flag = p.ident("'true' or 'false'")
            if flag.value not in ("true", "false"):
                p.fail("'true' or 'false'")
            recursion = flag.value == "true"
        elif p.accept("require"):
            rule_tok = p.ident("observer_of, actual_object or predecessor")
            if rule_tok.value not in _REQUIRE_RULES:
                p.fail("observer_of, actual_object or predecessor")
            applies = frozenset(kind_list()) if p.tok.kind == "ident" and not p.at("from") else frozenset()
            sources = frozenset(kind_list()) if p.accept("from") else frozenset()
            required.append(RequiredContext(_REQUIRE_RULES[rule_tok.value], applies, sources))
        else:
            p.fail("'kinds', 'edge', 'same_kind_recursion', 'require' or '}'")
        p.expect(";")
    p.advance()
    p.end()
    return ConformanceProfile(name, frozenset(kinds), frozenset(edges), recursion, tuple(required))


def serialize_profile(profile: ConformanceProfile) -> str:
    lines = [f"profile {profile.name} {{", f"  kinds {', '.join(sorted(profile.kinds))};"]
    by_child: dict[str, list[str]] = {}
    for parent, child in sorted(profile.allowed_edges):
        by_child.setdefault(child, []).append(parent)
    for child, parents in sorted(by_child.items()):
        lines.append(f"  edge {{{', '.join(parents)}}} -> {child};")
    lines.append(f"  same_kind_recursion {'true' if profile.allow_same_kind_temporal_recursion else 'false'};")
    for req in profile.required_contexts:
        text = f"  require {_REQUIRE_NAMES[req.rule]}"
        if req.kinds:
            text += " " + ", ".join(sorted(req.kinds))
        if req.from_kinds:
            text += " from " + ", ".join(sorted(req.from_kinds))
        lines.append(text + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"
