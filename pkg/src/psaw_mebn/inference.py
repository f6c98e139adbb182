"""Exact posterior marginals on an SSBN.

``eliminate_marginal`` runs variable elimination over a min-degree order.
``enumerate_marginal`` sums the full joint and is kept as an independent
reference; it shares no code with the factor machinery below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from .core import state_index
from .diagnostics import InferenceError, NotFound, OracleError
from .grounding import SSBN

ZERO_EVIDENCE_THRESHOLD = 1e-300
ORACLE_MAX_CONFIGURATIONS = 2**22


@dataclass(frozen=True)
class Posterior:
    atom: str
    distribution: dict[str, float]

    def __getitem__(self, state: str) -> float:
        return self.distribution[state]

    def format(self) -> str:
        return f"{self.atom}: " + " ".join(f"{s}={p:.9f}" for s, p in self.distribution.items())

    def to_dict(self) -> dict:
        return {"atom": self.atom, "distribution": dict(self.distribution)}


@dataclass(frozen=True)
class Factor:
    """Nonnegative table over ``scope``; axis ``i`` of ``table`` is ``scope[i]``."""

    scope: tuple[str, ...]
    table: np.ndarray

    @property
    def flat(self) -> np.ndarray:
        """Row-major values, leftmost scope variable most significant."""
        return self.table.reshape(-1)

    def _aligned(self, scope: Sequence[str]) -> np.ndarray:
        """View of the table broadcastable over ``scope`` (a superset of ours)."""
        order = sorted(range(len(self.scope)), key=lambda i: scope.index(self.scope[i]))
        table = np.transpose(self.table, order)
        shape = [self.table.shape[self.scope.index(v)] if v in self.scope else 1 for v in scope]
        return table.reshape(shape)

    def __mul__(self, other: Factor) -> Factor:
        scope = tuple(dict.fromkeys(self.scope + other.scope))
        return Factor(scope, self._aligned(scope) * other._aligned(scope))

    def sum_out(self, var: str) -> Factor:
        axis = self.scope.index(var)
        return Factor(self.scope[:axis] + self.scope[axis + 1 :], self.table.sum(axis=axis))

    def reduce(self, var: str, index: int) -> Factor:
        if var not in self.scope:
            return self
        axis = self.scope.index(var)
        return Factor(self.scope[:axis] + self.scope[axis + 1 :], np.take(self.table, index, axis=axis))


def node_factor(ssbn: SSBN, node_id: str) -> Factor:
    node = ssbn.node(node_id)
    shape = [len(ssbn.node(p).states) for p in node.parents] + [len(node.states)]
    return Factor((*node.parents, node.id), np.asarray(node.cpt, dtype=float).reshape(shape))


def _resolve_evidence(ssbn: SSBN, evidence: Mapping[str, str] | None) -> dict[str, str]:
    evidence = dict(ssbn.evidence if evidence is None else evidence)
    for node_id, state in evidence.items():
        if node_id not in ssbn:
            raise NotFound(f"evidence on unknown node {node_id}")
        state_index(ssbn.node(node_id).template, state)
    return evidence


def moral_graph(ssbn: SSBN) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(ssbn.ids)
    for node in ssbn.nodes:
        graph.add_edges_from((p, node.id) for p in node.parents)
        for i, a in enumerate(node.parents):
            graph.add_edges_from((a, b) for b in node.parents[i + 1 :])
    return graph


def elimination_order(
    ssbn: SSBN, keep: Iterable[str], evidence: Mapping[str, str] | None = None
) -> list[str]:
    """Greedy min-degree order over the moral graph; ties go to the smaller id.

    Evidence nodes are instantiated, not eliminated, and are dropped from the
    graph before degrees are counted.
    """
    evidence = ssbn.evidence if evidence is None else evidence
    keep = set(keep)
    graph = moral_graph(ssbn)
    graph.remove_nodes_from(evidence)
    candidates = {v for v in graph if v not in keep}
    order = []
    while candidates:
        var = min(candidates, key=lambda v: (graph.degree(v), v))
        neighbours = list(graph.neighbors(var))
        graph.add_edges_from(
            (a, b) for i, a in enumerate(neighbours) for b in neighbours[i + 1 :]
        )
        graph.remove_node(var)
        candidates.remove(var)
        order.append(var)
    return order


def eliminate_marginal(
    ssbn: SSBN,
    query: str,
    evidence: Mapping[str, str] | None = None,
    order: Sequence[str] | None = None,
) -> Posterior:
    """P(query | evidence) by variable elimination.

    ``evidence`` defaults to the evidence recorded on the SSBN nodes; pass a
    mapping (possibly empty) to override it. ``order`` overrides the
    min-degree elimination order and must cover every non-query,
    non-evidence node.
    """
    if query not in ssbn:
        raise NotFound(f"query {query} is not a node of the SSBN")
    evidence = _resolve_evidence(ssbn, evidence)
    query_state = evidence.pop(query, None)
    query_node = ssbn.node(query)

    factors = []
    for node in ssbn.nodes:
        f = node_factor(ssbn, node.id)
        for var, state in evidence.items():
            f = f.reduce(var, ssbn.node(var).states.index(state))
        factors.append(f)

    if order is None:
        order = elimination_order(ssbn, {query}, evidence)
    expected = set(ssbn.ids) - set(evidence) - {query}
    if set(order) != expected:
        raise ValueError("elimination order must cover exactly the non-query, non-evidence nodes")

    for var in order:
        related = [f for f in factors if var in f.scope]
        if not related:
            continue
        factors = [f for f in factors if var not in f.scope]
        product = related[0]
        for f in related[1:]:
            product = product * f
        factors.append(product.sum_out(var))

    result = Factor((query,), np.ones(len(query_node.states)))
    for f in factors:
        result = result * f
    values = result.table.reshape(-1).copy()
    if query_state is not None:
        mask = np.zeros_like(values)
        mask[query_node.states.index(query_state)] = 1.0
        values *= mask
    return _normalize(query, query_node.states, values)


def _normalize(query: str, states: Sequence[str], values: np.ndarray) -> Posterior:
    total = float(values.sum())
    if not total >= ZERO_EVIDENCE_THRESHOLD:
        raise InferenceError(f"evidence has zero probability (normalizer {total:.3g}) for query {query}")
    return Posterior(query, {s: float(v) / total for s, v in zip(states, values)})


def enumerate_marginal(ssbn: SSBN, query: str, evidence: Mapping[str, str] | None = None) -> Posterior:
    """P(query | evidence) from the full joint distribution."""
    if query not in ssbn:
        raise NotFound(f"query {query} is not a node of the SSBN")
    evidence = _resolve_evidence(ssbn, evidence)
    ids = ssbn.ids
    axis = {nid: i for i, nid in enumerate(ids)}
    cards = [len(ssbn.node(nid).states) for nid in ids]
    size = math.prod(cards)
    if size > ORACLE_MAX_CONFIGURATIONS:
        raise OracleError(f"joint state space has {size} configurations, limit is {ORACLE_MAX_CONFIGURATIONS}")

    joint = np.ones(cards)
    for node in ssbn.nodes:
        members = [*node.parents, node.id]
        cpt = np.asarray(node.cpt, dtype=float).reshape([cards[axis[m]] for m in members])
        # put the CPT axes in joint-axis order, then pad the remaining axes with 1
        perm = sorted(range(len(members)), key=lambda k: axis[members[k]])
        placed = np.transpose(cpt, perm)
        shape = [1] * len(ids)
        for k in perm:
            shape[axis[members[k]]] = cards[axis[members[k]]]
        joint = joint * placed.reshape(shape)

    for nid, state in evidence.items():
        keep = np.zeros(cards[axis[nid]])
        keep[ssbn.node(nid).states.index(state)] = 1.0
        shape = [1] * len(ids)
        shape[axis[nid]] = cards[axis[nid]]
        joint = joint * keep.reshape(shape)

    others = tuple(i for i in range(len(ids)) if i != axis[query])
    marginal = joint.sum(axis=others) if others else joint
    return _normalize(query, ssbn.node(query).states, np.asarray(marginal).reshape(-1))


def posterior(ssbn: SSBN, query: str, evidence: Mapping[str, str] | None = None, engine: str = "ve") -> Posterior:
    if engine == "ve":
        return eliminate_marginal(ssbn, query, evidence)
    if engine == "enum":
        return enumerate_marginal(ssbn, query, evidence)
    raise ValueError(f"unknown engine {engine!r}")
