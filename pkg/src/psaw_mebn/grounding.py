"""Situation-specific Bayesian network construction.

Construction is query-directed: starting from the query and evidence atoms,
each atom is instantiated from its home MFrag, its parents are collected over
every context-satisfying binding of the MFrag's free ordinary variables, and
unseen parents are expanded in turn. Context relations are closed-world facts;
``Predecessor`` facts are derived from time ordinals.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .core import (
    PREDECESSOR,
    Atom,
    ContextConstraint,
    EntityInstance,
    LocalDistribution,
    MFrag,
    MTheory,
    Quantifier,
    ResidentNode,
    RVTemplate,
    WorldModel,
)
from .diagnostics import GroundingError

DEFAULT_MAX_DEPTH = 10_000


@dataclass(frozen=True)
class GroundNode:
    """A ground random variable with its CPT.

    ``cpt`` has one row per parent-state combination (mixed radix over
    ``parents``, leftmost most significant) and one column per own state.
    """

    id: str
    template: RVTemplate
    parents: tuple[str, ...] = ()
    cpt: tuple[tuple[float, ...], ...] = ((1.0,),)
    evidence: str | None = None

    @property
    def states(self) -> tuple[str, ...]:
        return self.template.states


@dataclass(frozen=True)
class SSBN:
    nodes: tuple[GroundNode, ...]
    queries: tuple[str, ...] = ()
    _index: dict[str, GroundNode] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._index.update({n.id: n for n in self.nodes})

    def node(self, node_id: str) -> GroundNode:
        return self._index[node_id]

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._index

    @property
    def ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    @property
    def evidence(self) -> dict[str, str]:
        return {n.id: n.evidence for n in self.nodes if n.evidence is not None}

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(p, n.id) for n in self.nodes for p in n.parents]

    def with_evidence(self, evidence: Mapping[str, str]) -> SSBN:
        nodes = tuple(
            GroundNode(n.id, n.template, n.parents, n.cpt, evidence.get(n.id)) for n in self.nodes
        )
        return SSBN(nodes, self.queries)


def derive_time_facts(world: WorldModel) -> frozenset[Atom]:
    """``Predecessor(a, b)`` for every pair of consecutive ordinals of one ordered type."""
    by_type: dict[str, dict[int, str]] = {}
    for inst in world.instances:
        if inst.ordinal is not None:
            by_type.setdefault(inst.type, {})[inst.ordinal] = inst.id
    facts = set()
    for ordinals in by_type.values():
        for n, current in ordinals.items():
            previous = ordinals.get(n - 1)
            if previous is not None:
                facts.add(Atom(PREDECESSOR, (previous, current)))
    return frozenset(facts)


def context_holds(ctx: ContextConstraint, binding: Mapping[str, str], facts: frozenset[Atom] | set[Atom]) -> bool:
    return ctx.relation.substitute(dict(binding)) in facts


def world_facts(world: WorldModel) -> frozenset[Atom]:
    return frozenset(world.facts) | derive_time_facts(world)


def evaluate_context(
    mfrag: MFrag,
    binding: Mapping[str, EntityInstance | str],
    world: WorldModel,
    facts: frozenset[Atom] | None = None,
) -> bool:
    """True iff every context constraint of ``mfrag`` holds under ``binding``."""
    if facts is None:
        facts = world_facts(world)
    ids = {ov: (v.id if isinstance(v, EntityInstance) else v) for ov, v in binding.items()}
    return all(context_holds(ctx, ids, facts) for ctx in mfrag.contexts)


def build_cpt(
    lpd: LocalDistribution,
    parents: Sequence[tuple[str, Sequence[str]]],
    slots: Mapping[Atom, Iterable[str]],
) -> tuple[tuple[float, ...], ...]:
    """Compile a rule-based LPD into a row-major table.

    ``parents`` lists ``(id, states)`` in CPT order. ``slots`` maps each rule
    atom of the LPD to the ground parent ids it was instantiated as; a rule
    atom missing from ``slots`` has no instances. ``any`` over no instances is
    false and ``all`` over no instances is true.
    """
    position = {pid: i for i, (pid, _) in enumerate(parents)}
    members = {atom: [position[pid] for pid in ids] for atom, ids in slots.items()}
    rows = []
    for combo in itertools.product(*(states for _, states in parents)):
        row = lpd.default
        for rule in lpd.rules:
            values = [combo[i] for i in members.get(rule.parent, ())]
            if rule.quantifier is Quantifier.ANY:
                hit = any(v == rule.state for v in values)
            else:
                hit = all(v == rule.state for v in values)
            if hit:
                row = rule.dist
                break
        if row is None:
            raise GroundingError("LPD has no matching rule and no default", "REC-2")
        rows.append(tuple(float(p) for p in row))
    return tuple(rows)


class _Grounder:
    def __init__(self, theory: MTheory, world: WorldModel, max_depth: int):
        self.theory = theory
        self.world = world
        self.max_depth = max_depth
        self.facts = world_facts(world)
        self.instances = {inst.id: inst for inst in world.instances}
        self.templates = theory.templates()
        self.atoms: dict[str, Atom] = {}

    def home(self, atom: Atom) -> tuple[MFrag, ResidentNode]:
        homes = self.theory.homes(atom.name)
        if not homes:
            raise GroundingError(f"{atom} has no home MFrag", "GROUND-1")
        if len(homes) > 1:
            raise GroundingError(f"{atom.name} has several home MFrags", "GROUND-1")
        mfrag, res = homes[0]
        if res.template.deterministic:
            raise GroundingError(f"{atom} is a CTX relation, not a random variable", "GROUND-1")
        if len(atom.args) != len(res.atom.args):
            raise GroundingError(f"{atom} has the wrong number of arguments", "GROUND-1")
        return mfrag, res

    def base_binding(self, atom: Atom, mfrag: MFrag, res: ResidentNode) -> dict[str, str]:
        types = mfrag.ov_types()
        binding: dict[str, str] = {}
        for ov, arg in zip(res.atom.args, atom.args):
            inst = self.instances.get(arg)
            if inst is None or inst.type != types[ov]:
                raise GroundingError(f"{atom}: no {types[ov]} entity {arg!r} to bind {ov}", "GROUND-1")
            if binding.setdefault(ov, arg) != arg:
                raise GroundingError(f"{atom}: conflicting values for {ov}", "GROUND-1")
        return binding

    def bindings(self, mfrag: MFrag, res: ResidentNode, base: dict[str, str]) -> Iterable[dict[str, str]]:
        """Context-satisfying extensions of ``base`` over the ovs parents and contexts use.

        Backtracking search that tests each context as soon as its ovs are bound.
        """
        used = [a for p in res.parents for a in p.args] + [a for c in mfrag.contexts for a in c.ovs]
        free = [ov for ov in dict.fromkeys(used) if ov not in base]
        types = mfrag.ov_types()
        domains = [[i.id for i in self.world.instances_of(types[ov])] for ov in free]
        # schedule[k]: contexts whose last unbound ov is free[k - 1]
        position = {ov: k + 1 for k, ov in enumerate(free)}
        schedule: list[list[ContextConstraint]] = [[] for _ in range(len(free) + 1)]
        for ctx in mfrag.contexts:
            schedule[max((position.get(ov, 0) for ov in ctx.ovs), default=0)].append(ctx)

        binding = dict(base)
        if not all(context_holds(c, binding, self.facts) for c in schedule[0]):
            return

        def extend(i: int):
            if i == len(free):
                yield dict(binding)
                return
            for value in domains[i]:
                binding[free[i]] = value
                if all(context_holds(c, binding, self.facts) for c in schedule[i + 1]):
                    yield from extend(i + 1)
            binding.pop(free[i], None)

        yield from extend(0)

    def expand(self, atom: Atom) -> tuple[ResidentNode, dict[Atom, list[str]]]:
        mfrag, res = self.home(atom)
        base = self.base_binding(atom, mfrag, res)
        slots: dict[Atom, dict[str, None]] = {p: {} for p in res.parents}
        for binding in self.bindings(mfrag, res, base):
            for parent in res.parents:
                ground = parent.substitute(binding)
                self.atoms[str(ground)] = ground
                slots[parent][str(ground)] = None
        me = str(atom)
        for parent, ids in slots.items():
            if me in ids:
                raise GroundingError(f"a binding of MFrag {mfrag.name} makes {atom} its own parent via {parent}", "GROUND-3")
        return res, {p: sorted(ids) for p, ids in slots.items() if ids}

    def run(self) -> SSBN:
        roots = list(dict.fromkeys([*self.world.queries, *self.world.evidence]))
        expanded: dict[str, tuple[Atom, ResidentNode, dict[Atom, list[str]]]] = {}
        self.atoms.update({str(a): a for a in roots})
        queue = deque((a, 0) for a in roots)
        seen = {str(a) for a in roots}
        while queue:
            atom, depth = queue.popleft()
            if depth > self.max_depth:
                raise GroundingError(f"expansion of {atom} exceeded depth limit {self.max_depth}", "GROUND-2")
            res, slots = self.expand(atom)
            expanded[str(atom)] = (atom, res, slots)
            for ids in slots.values():
                for pid in ids:
                    if pid not in seen:
                        seen.add(pid)
                        queue.append((self.atoms[pid], depth + 1))

        graph = nx.DiGraph()
        graph.add_nodes_from(expanded)
        for nid, (_, _, slots) in expanded.items():
            for ids in slots.values():
                graph.add_edges_from((pid, nid) for pid in ids)
        try:
            order = list(nx.lexicographical_topological_sort(graph))
        except nx.NetworkXUnfeasible:
            cycle = nx.find_cycle(graph)
            raise GroundingError(f"grounded network is cyclic: {cycle}", "GROUND-4") from None

        evidence = {str(a): s for a, s in self.world.evidence.items()}
        nodes = []
        for nid in order:
            atom, res, slots = expanded[nid]
            parents = sorted({pid for ids in slots.values() for pid in ids})
            parent_states = [(pid, self.templates[self.atoms[pid].name].states) for pid in parents]
            cpt = build_cpt(res.lpd, parent_states, slots)
            nodes.append(GroundNode(nid, res.template, tuple(parents), cpt, evidence.get(nid)))
        return SSBN(tuple(nodes), tuple(str(q) for q in self.world.queries))


def _atom_from_id(node_id: str) -> Atom:
    name, _, rest = node_id.partition("(")
    return Atom(name, tuple(rest[:-1].split(",")) if rest[:-1] else ())


def build_ssbn(theory: MTheory, world: WorldModel, max_depth: int = DEFAULT_MAX_DEPTH) -> SSBN:
    """Ground the part of ``theory`` that the world's queries and evidence need.

    Nodes come out in topological order with ties broken by id.
    """
    return _Grounder(theory, world, max_depth).run()


# --- export ------------------------------------------------------------------


def export_json(ssbn: SSBN) -> bytes:
    nodes = []
    for n in ssbn.nodes:
        record = {
            "id": n.id,
            "states": list(n.states),
            "parents": list(n.parents),
            "cpt": [p for row in n.cpt for p in row],
        }
        if n.evidence is not None:
            record["evidence"] = n.evidence
        nodes.append(record)
    return (json.dumps({"nodes": nodes, "queries": list(ssbn.queries)}, indent=2) + "\n").encode("utf-8")


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(ssbn: SSBN) -> bytes:
    queries = set(ssbn.queries)
    lines = ["digraph SSBN {", "  rankdir=LR;", "  node [shape=ellipse];"]
    for n in ssbn.nodes:
        label = _atom_from_id(n.id).label
        attrs = [f"label={_dot_id(label)}"]
        if n.evidence is not None:
            attrs[0] = f"label={_dot_id(label + ' = ' + n.evidence)}"
            attrs += ["style=filled", 'fillcolor="gray85"']
        if n.id in queries:
            attrs.append("peripheries=2")
        lines.append(f"  {_dot_id(n.id)} [{', '.join(attrs)}];")
    for parent, child in ssbn.edges:
        lines.append(f"  {_dot_id(parent)} -> {_dot_id(child)};")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")
