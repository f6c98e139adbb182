"""MEBN consistency checks and profile-driven PSAW conformance.

Rule ids (stable):

    UH-1       template resident in more than one MFrag
    UH-2       input or context referencing a template with no home
    CYC-1      dependency cycle with no recursive (Predecessor-ordered) edge
    REC-1      temporal input whose time ov is not tied to the resident by Predecessor
    REC-2      recursive resident with no default reachable at the first timestamp
    CONF-KIND  resident kind not declared by the profile
    CONF-EDGE  parent kind -> child kind not allowed by the profile
    CONF-TIME  parent at a later time than its child
    CONF-OBS   OC resident over sensor and target ovs without ObserverOf   (warning)
    CONF-ACT   reported resident with a target parent without ActualObject (warning)
    CONF-PRED  recursive input without Predecessor                          (warning)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .core import (
    ACTUAL_OBJECT,
    CTX,
    OBSERVER_OF,
    PREDECESSOR,
    ConformanceProfile,
    EdgeRelation,
    EntityKind,
    MFrag,
    MTheory,
    TemplateEdge,
    dependency_edges,
)
from .diagnostics import Diagnostic, error, warning


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not any(d.is_error for d in self.diagnostics)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


def check_unique_home(theory: MTheory) -> list[Diagnostic]:
    out = []
    seen = set()
    for mfrag in theory.mfrags:
        for res in mfrag.residents:
            name = res.template.name
            homes = theory.homes(name)
            if len(homes) > 1 and name not in seen:
                seen.add(name)
                where = ", ".join(m.name for m, _ in homes)
                out.append(error("UH-1", f"{name} is resident in {len(homes)} MFrags ({where})", homes[1][1].span))
    templates = theory.templates()
    for mfrag in theory.mfrags:
        for ctx in mfrag.contexts:
            if ctx.atom.name not in templates:
                out.append(error("UH-2", f"context {ctx} in MFrag {mfrag.name} references {ctx.atom.name}, which has no home MFrag", ctx.span))
        for inp in mfrag.inputs:
            if inp.atom.name not in templates:
                out.append(error("UH-2", f"input {inp.atom} in MFrag {mfrag.name} has no home MFrag", inp.span))
    return out


def _resolved_edges(theory: MTheory) -> list[TemplateEdge]:
    templates = theory.templates()
    return [e for e in dependency_edges(theory) if e.parent in templates]


def check_template_acyclic(theory: MTheory) -> list[Diagnostic]:
    """CYC-1 for every simple cycle made only of same-slice edges.

    Cycles through recursive edges strictly decrease a time ordinal and are
    allowed; cycles through unconstrained or backward temporal edges are
    reported by REC-1 and CONF-TIME instead.
    """
    graph = nx.DiGraph()
    spans = {}
    for edge in _resolved_edges(theory):
        if edge.same_slice:
            graph.add_edge(edge.parent, edge.child)
            spans.setdefault((edge.parent, edge.child), edge.span)
    cycles = []
    for cycle in nx.simple_cycles(graph):
        i = cycle.index(min(cycle))
        cycles.append(cycle[i:] + cycle[:i])
    out = []
    for cycle in sorted(cycles):
        path = " -> ".join(cycle + [cycle[0]])
        out.append(error("CYC-1", f"dependency cycle without a recursive edge: {path}", spans[(cycle[-1], cycle[0])]))
    return out


def check_recursion_wellformed(theory: MTheory) -> list[Diagnostic]:
    out = []
    ordered = theory.ordered_types()
    for mfrag in theory.mfrags:
        ov_types = mfrag.ov_types()
        for ctx in mfrag.contexts:
            if ctx.equals is None and ctx.atom.name == PREDECESSOR:
                arg_types = [ov_types.get(a) for a in ctx.atom.args]
                if len(arg_types) != 2 or arg_types[0] != arg_types[1] or arg_types[0] not in ordered:
                    shown = ", ".join(t or "?" for t in arg_types)
                    out.append(error("REC-1", f"Predecessor context in MFrag {mfrag.name} must relate two ovs of one ordered time type, got ({shown})", ctx.span))
    for edge in _resolved_edges(theory):
        if edge.relation is EdgeRelation.UNCONSTRAINED:
            out.append(error("REC-1", _unconstrained_message(edge), edge.span))
    recursive_children = {(e.mfrag, e.child) for e in _resolved_edges(theory) if e.recursive}
    for mfrag in theory.mfrags:
        for res in mfrag.residents:
            if (mfrag.name, res.template.name) in recursive_children and (res.lpd is None or res.lpd.default is None):
                out.append(error("REC-2", f"recursive resident {res.atom} has no default distribution for the first timestamp", res.span))
    return out


def _unconstrained_message(edge: TemplateEdge) -> str:
    return (
        f"input {edge.parent_atom} of {edge.child_atom} in MFrag {edge.mfrag} takes a time argument "
        f"not tied to the resident's time by a Predecessor context"
    )


def _ov_kinds(theory: MTheory, mfrag: MFrag) -> dict[str, EntityKind]:
    kinds = {et.name: et.kind for et in theory.entity_types}
    return {ov.name: kinds.get(ov.type, EntityKind.OTHER) for ov in mfrag.ovs}


def check_conformance(theory: MTheory, profile: ConformanceProfile) -> list[Diagnostic]:
    out = []
    allowed_kinds = profile.all_kinds()
    templates = theory.templates()

    for mfrag in theory.mfrags:
        for res in mfrag.residents:
            kind = res.template.kind
            if kind is None:
                out.append(error("CONF-KIND", f"{res.atom} declares no RV kind", res.span))
            elif kind not in allowed_kinds:
                out.append(error("CONF-KIND", f"{res.atom} has kind {kind}, unknown to profile {profile.name} {sorted(profile.kinds)}", res.span))

    seen = set()
    for edge in _resolved_edges(theory):
        key = (edge.mfrag, edge.parent_atom, edge.child_atom)
        if key in seen:
            continue
        seen.add(key)
        parent_kind = templates[edge.parent].kind
        child_kind = edge.child_kind
        if edge.relation is EdgeRelation.BACKWARD:
            out.append(error("CONF-TIME", f"{edge.parent_atom} is later than {edge.child_atom} in MFrag {edge.mfrag}; a later event cannot cause an earlier one", edge.span))
        if CTX in (parent_kind, child_kind):
            continue
        if parent_kind == child_kind and edge.recursive and profile.allow_same_kind_temporal_recursion:
            continue
        if (parent_kind, child_kind) not in profile.allowed_edges:
            out.append(error("CONF-EDGE", f"edge {edge.parent}({parent_kind}) -> {edge.child}({child_kind}) in MFrag {edge.mfrag} is not allowed by profile {profile.name}", edge.span))

    for req in profile.required_contexts:
        if req.rule == "CONF-OBS":
            out.extend(_check_observer(theory, req.kinds))
        elif req.rule == "CONF-ACT":
            out.extend(_check_actual_object(theory, req.kinds, req.from_kinds))
        elif req.rule == "CONF-PRED":
            out.extend(_check_predecessor(theory, req.kinds))
    return out


def _applies(kinds: frozenset[str], kind: str | None) -> bool:
    return not kinds or kind in kinds


def _check_observer(theory: MTheory, kinds: frozenset[str]) -> list[Diagnostic]:
    out = []
    for mfrag in theory.mfrags:
        ov_kinds = _ov_kinds(theory, mfrag)
        sensors = {ov for ov, k in ov_kinds.items() if k is EntityKind.SENSOR}
        targets = {ov for ov, k in ov_kinds.items() if k is EntityKind.TARGET}
        if not sensors or not targets:
            continue
        linked = any(
            c.equals is None and c.atom.name == OBSERVER_OF and sensors & set(c.atom.args) and targets & set(c.atom.args)
            for c in mfrag.contexts
        )
        if linked:
            continue
        for res in mfrag.residents:
            if res.template.kind != CTX and _applies(kinds, res.template.kind):
                out.append(warning("CONF-OBS", f"{res.atom} in MFrag {mfrag.name} binds sensor and target ovs without an ObserverOf(sr, tr) context", res.span))
    return out


def _check_actual_object(theory: MTheory, kinds: frozenset[str], from_kinds: frozenset[str]) -> list[Diagnostic]:
    out = []
    templates = theory.templates()
    for mfrag in theory.mfrags:
        actual = {c.equals for c in mfrag.contexts if c.equals is not None and c.atom.name == ACTUAL_OBJECT}
        for res in mfrag.residents:
            if not _applies(kinds, res.template.kind) or res.template.kind == CTX:
                continue
            for parent in res.parents:
                template = templates.get(parent.name)
                if template is None or not _applies(from_kinds, template.kind):
                    continue
                if not actual & set(parent.args):
                    out.append(warning("CONF-ACT", f"{res.atom} depends on {parent} in MFrag {mfrag.name} without a tr = ActualObject(rt) context", res.span))
    return out


def _check_predecessor(theory: MTheory, kinds: frozenset[str]) -> list[Diagnostic]:
    out = []
    for edge in _resolved_edges(theory):
        if edge.relation is not EdgeRelation.UNCONSTRAINED:
            continue
        if _applies(kinds, edge.child_kind):
            out.append(warning("CONF-PRED", _unconstrained_message(edge), edge.span))
    return out


def validate_all(theory: MTheory, profile: ConformanceProfile, strict: bool = False) -> ValidationReport:
    """Run every check in the fixed order UH, CYC, REC, CONF.

    With ``strict`` warnings are promoted to errors.
    """
    diagnostics = [
        *check_unique_home(theory),
        *check_template_acyclic(theory),
        *check_recursion_wellformed(theory),
        *check_conformance(theory, profile),
    ]
    if strict:
        diagnostics = [d.promoted() for d in diagnostics]
    return ValidationReport(tuple(diagnostics))
