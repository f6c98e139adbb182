"""In-memory model of MTheories, MFrags, world models and conformance profiles.

Every value here is a frozen dataclass built once by the parser (or by hand in
tests) and never mutated afterwards. Source spans ride along on declarations
but are excluded from equality, so a parse/serialize round trip compares equal.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator

import networkx as nx

from .diagnostics import (
    MultipleHomes,
    NotFound,
    SourceSpan,
    UnknownState,
    UnresolvedReference,
)

BOOLEAN_STATES = ("true", "false")
CTX = "CTX"
PREDECESSOR = "Predecessor"
OBSERVER_OF = "ObserverOf"
ACTUAL_OBJECT = "ActualObject"
NORMALIZATION_TOLERANCE = 1e-9


class EntityKind(str, enum.Enum):
    TIME = "time"
    OBSERVER = "observer"
    SENSOR = "sensor"
    REPORTED = "reported"
    TARGET = "target"
    OTHER = "other"


class MFragGroup(str, enum.Enum):
    CONTEXT = "context"
    TARGET = "target"
    OBSERVING = "observing"
    REPORT = "report"
    SITUATION = "situation"


class Quantifier(str, enum.Enum):
    ANY = "any"
    ALL = "all"


def _span() -> SourceSpan | None:
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Atom:
    """``Name(arg1, ..., argk)``; args are ov names in templates, instance ids when ground."""

    name: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.name}({','.join(self.args)})"

    @property
    def label(self) -> str:
        """Underscore display form, e.g. ``Speed_tr1_t1``."""
        return "_".join((self.name, *self.args))

    def substitute(self, binding: dict[str, str]) -> Atom:
        return Atom(self.name, tuple(binding[a] for a in self.args))


@dataclass(frozen=True)
class EntityType:
    name: str
    kind: EntityKind = EntityKind.OTHER
    ordered: bool = False
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class OrdinaryVariable:
    name: str
    type: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RVTemplate:
    name: str
    arg_types: tuple[str, ...]
    states: tuple[str, ...]
    kind: str | None = None

    @property
    def deterministic(self) -> bool:
        return self.kind == CTX


def state_index(template: RVTemplate, label: str) -> int:
    """Zero-based position of ``label`` in the template's declared state order."""
    try:
        return template.states.index(label)
    except ValueError:
        raise UnknownState(f"{label!r} is not a state of {template.name} {list(template.states)}") from None


@dataclass(frozen=True)
class ContextConstraint:
    """``Pred(ovs)`` when ``equals`` is None, otherwise ``equals = Func(ovs)``.

    The equality form is stored as the relation ``Func(ovs..., equals)``; a world
    states it with the fact ``Func(a..., b)``.
    """

    atom: Atom
    equals: str | None = None
    span: SourceSpan | None = _span()

    @property
    def relation(self) -> Atom:
        if self.equals is None:
            return self.atom
        return Atom(self.atom.name, (*self.atom.args, self.equals))

    @property
    def ovs(self) -> tuple[str, ...]:
        return self.relation.args

    def __str__(self) -> str:
        if self.equals is None:
            return str(self.atom)
        return f"{self.equals} = {self.atom}"


@dataclass(frozen=True)
class Rule:
    quantifier: Quantifier
    parent: Atom
    state: str
    dist: tuple[float, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class LocalDistribution:
    rules: tuple[Rule, ...] = ()
    default: tuple[float, ...] | None = None

    @property
    def distributions(self) -> Iterator[tuple[float, ...]]:
        for rule in self.rules:
            yield rule.dist
        if self.default is not None:
            yield self.default


def is_normalized(dist: tuple[float, ...]) -> bool:
    return (
        all(math.isfinite(p) and 0.0 <= p <= 1.0 for p in dist)
        and abs(math.fsum(dist) - 1.0) <= NORMALIZATION_TOLERANCE
    )


@dataclass(frozen=True)
class InputNode:
    atom: Atom
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ResidentNode:
    atom: Atom
    template: RVTemplate
    lpd: LocalDistribution | None = None
    span: SourceSpan | None = _span()

    @property
    def parents(self) -> tuple[Atom, ...]:
        """Distinct parent atoms, in order of first reference by the LPD rules."""
        if self.lpd is None:
            return ()
        return tuple(dict.fromkeys(rule.parent for rule in self.lpd.rules))


@dataclass(frozen=True)
class MFrag:
    name: str
    group: MFragGroup | None = None
    ovs: tuple[OrdinaryVariable, ...] = ()
    contexts: tuple[ContextConstraint, ...] = ()
    inputs: tuple[InputNode, ...] = ()
    residents: tuple[ResidentNode, ...] = ()
    span: SourceSpan | None = _span()

    def ov(self, name: str) -> OrdinaryVariable:
        for ov in self.ovs:
            if ov.name == name:
                return ov
        raise NotFound(f"ordinary variable {name!r} not declared in MFrag {self.name}")

    def ov_types(self) -> dict[str, str]:
        return {ov.name: ov.type for ov in self.ovs}

    def resident(self, name: str) -> ResidentNode:
        for res in self.residents:
            if res.template.name == name:
                return res
        raise NotFound(f"{name} is not resident in MFrag {self.name}")

    def predecessor_pairs(self) -> list[tuple[str, str]]:
        """(previous, current) ov pairs from ``Predecessor`` contexts."""
        return [
            (c.atom.args[0], c.atom.args[1])
            for c in self.contexts
            if c.equals is None and c.atom.name == PREDECESSOR and len(c.atom.args) == 2
        ]


@dataclass(frozen=True)
class MTheory:
    name: str
    entity_types: tuple[EntityType, ...] = ()
    mfrags: tuple[MFrag, ...] = ()
    span: SourceSpan | None = _span()

    def entity_type(self, name: str) -> EntityType:
        for et in self.entity_types:
            if et.name == name:
                return et
        raise NotFound(f"entity type {name!r} not declared")

    def ordered_types(self) -> set[str]:
        return {et.name for et in self.entity_types if et.ordered}

    def homes(self, template_name: str) -> list[tuple[MFrag, ResidentNode]]:
        return [
            (mfrag, res)
            for mfrag in self.mfrags
            for res in mfrag.residents
            if res.template.name == template_name
        ]

    def template(self, name: str) -> RVTemplate:
        return home_resident(self, name).template

    def templates(self) -> dict[str, RVTemplate]:
        """Every resident template by name; first declaration wins on duplicates."""
        out: dict[str, RVTemplate] = {}
        for mfrag in self.mfrags:
            for res in mfrag.residents:
                out.setdefault(res.template.name, res.template)
        return out


def home_resident(theory: MTheory, template_name: str) -> ResidentNode:
    return _unique_home(theory, template_name)[1]


def home_mfrag(theory: MTheory, template_name: str) -> MFrag:
    """The single MFrag in which ``template_name`` is resident."""
    return _unique_home(theory, template_name)[0]


def _unique_home(theory: MTheory, template_name: str) -> tuple[MFrag, ResidentNode]:
    homes = theory.homes(template_name)
    if not homes:
        raise NotFound(f"no MFrag defines {template_name}")
    if len(homes) > 1:
        names = ", ".join(m.name for m, _ in homes)
        raise MultipleHomes(f"{template_name} is resident in several MFrags: {names}")
    return homes[0]


# --- template dependency graph -------------------------------------------


class EdgeRelation(str, enum.Enum):
    SAME_SLICE = "sameSlice"
    RECURSIVE = "recursive"  # parent at pre_t, child at t of a Predecessor context
    BACKWARD = "backward"  # parent at t, child at pre_t: later causes earlier
    UNCONSTRAINED = "unconstrained"  # parent time ov free of any Predecessor link


@dataclass(frozen=True)
class TemplateEdge:
    parent: str
    child: str
    relation: EdgeRelation
    mfrag: str
    parent_atom: Atom
    child_atom: Atom
    child_kind: str | None = None
    span: SourceSpan | None = field(default=None, compare=False)

    @property
    def recursive(self) -> bool:
        return self.relation is EdgeRelation.RECURSIVE

    @property
    def same_slice(self) -> bool:
        return self.relation is EdgeRelation.SAME_SLICE


def classify_edge(theory: MTheory, mfrag: MFrag, parent: Atom, child: Atom) -> EdgeRelation:
    """Relate the ordered (time) arguments of a parent atom to those of its child."""
    ordered = theory.ordered_types()
    types = mfrag.ov_types()
    pairs = mfrag.predecessor_pairs()
    relation = EdgeRelation.SAME_SLICE
    for ov in parent.args:
        if types.get(ov) not in ordered or ov in child.args:
            continue
        if any(prev == ov and cur in child.args for prev, cur in pairs):
            relation = EdgeRelation.RECURSIVE
        elif any(cur == ov and prev in child.args for prev, cur in pairs):
            return EdgeRelation.BACKWARD
        else:
            return EdgeRelation.UNCONSTRAINED
    return relation


def dependency_edges(theory: MTheory) -> list[TemplateEdge]:
    """One edge per (parent atom, resident) pair in every MFrag, in declaration order."""
    edges = []
    for mfrag in theory.mfrags:
        rule_spans = {}
        for res in mfrag.residents:
            for rule in res.lpd.rules if res.lpd else ():
                rule_spans.setdefault((res.atom, rule.parent), rule.span)
            for parent in res.parents:
                edges.append(
                    TemplateEdge(
                        parent=parent.name,
                        child=res.template.name,
                        relation=classify_edge(theory, mfrag, parent, res.atom),
                        mfrag=mfrag.name,
                        parent_atom=parent,
                        child_atom=res.atom,
                        child_kind=res.template.kind,
                        span=rule_spans.get((res.atom, parent)) or res.span,
                    )
                )
    return edges


def template_dependency_graph(theory: MTheory, strict: bool = True) -> nx.MultiDiGraph:
    """Multigraph over template names with a ``TemplateEdge`` on every edge.

    With ``strict`` an input whose template has no home raises
    ``UnresolvedReference``; otherwise such references are skipped.
    """
    graph = nx.MultiDiGraph()
    for mfrag in theory.mfrags:
        for res in mfrag.residents:
            graph.add_node(res.template.name)
    for edge in dependency_edges(theory):
        if edge.parent not in graph:
            if strict:
                raise UnresolvedReference(f"input {edge.parent_atom} in MFrag {edge.mfrag} has no home MFrag")
            continue
        graph.add_edge(edge.parent, edge.child, edge=edge, recursive=edge.recursive, sameSlice=edge.same_slice)
    return graph


# --- conformance profiles --------------------------------------------------


@dataclass(frozen=True)
class RequiredContext:
    """A structural rule checked by the validator.

    ``rule`` is one of CONF-OBS, CONF-ACT, CONF-PRED. ``kinds`` selects the
    resident kinds it applies to (empty means all); ``from_kinds`` selects the
    parent kinds that trigger CONF-ACT.
    """

    rule: str
    kinds: frozenset[str] = frozenset()
    from_kinds: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ConformanceProfile:
    name: str
    kinds: frozenset[str]
    allowed_edges: frozenset[tuple[str, str]]
    allow_same_kind_temporal_recursion: bool = True
    required_contexts: tuple[RequiredContext, ...] = ()

    def all_kinds(self) -> frozenset[str]:
        return self.kinds | {CTX}


def _edges(table: list[tuple[set[str], str]]) -> frozenset[tuple[str, str]]:
    return frozenset((parent, child) for parents, child in table for parent in parents)


PSAW = ConformanceProfile(
    name="psaw",
    kinds=frozenset({"OC", "RT", "TR", "SIT"}),
    allowed_edges=_edges(
        [
            ({"OC"}, "OC"),
            ({"OC", "TR"}, "RT"),
            ({"TR", "SIT"}, "TR"),
            ({"SIT", "TR"}, "SIT"),
        ]
    ),
    allow_same_kind_temporal_recursion=True,
    required_contexts=(
        RequiredContext("CONF-OBS", frozenset({"OC"})),
        RequiredContext("CONF-ACT", frozenset({"RT"}), frozenset({"TR"})),
        RequiredContext("CONF-PRED"),
    ),
)

# The MSAW edge table has no SYS -> SYS entry; same-kind temporal recursion covers systems evolving over time.
MSAW = ConformanceProfile(
    name="msaw",
    kinds=frozenset({"OC", "RSYS", "RIT", "SYS", "IT", "SIT"}),
    allowed_edges=_edges(
        [
            ({"OC"}, "OC"),
            ({"SYS", "OC"}, "RSYS"),
            ({"IT", "OC"}, "RIT"),
            ({"IT"}, "SYS"),
            ({"SYS", "IT"}, "IT"),
            ({"SYS", "IT"}, "SIT"),
        ]
    ),
    allow_same_kind_temporal_recursion=True,
    required_contexts=(
        RequiredContext("CONF-OBS", frozenset({"OC"})),
        RequiredContext("CONF-ACT", frozenset({"RSYS", "RIT"}), frozenset({"SYS", "IT"})),
        RequiredContext("CONF-PRED"),
    ),
)

BUILTIN_PROFILES = {"psaw": PSAW, "msaw": MSAW}


# --- worlds ----------------------------------------------------------------


@dataclass(frozen=True)
class EntityInstance:
    id: str
    type: str
    ordinal: int | None = None
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class WorldModel:
    """Entities, closed-world CTX facts, evidence and queries for one situation.

    ``facts`` holds only user-asserted relations; Predecessor facts are derived
    from time ordinals by ``grounding.derive_time_facts``.
    """

    name: str
    instances: tuple[EntityInstance, ...] = ()
    facts: tuple[Atom, ...] = ()
    evidence: dict[Atom, str] = field(default_factory=dict)
    queries: tuple[Atom, ...] = ()

    def instance(self, entity_id: str) -> EntityInstance:
        for inst in self.instances:
            if inst.id == entity_id:
                return inst
        raise NotFound(f"no entity instance {entity_id!r}")

    def instances_of(self, type_name: str) -> list[EntityInstance]:
        return [inst for inst in self.instances if inst.type == type_name]
