"""Shared builders for the test suite: fixtures, mutants, random worlds and SSBNs."""

from __future__ import annotations

import dataclasses
import math
import random

import numpy as np

from psaw_mebn import fixtures
from psaw_mebn.core import BUILTIN_PROFILES, Atom, EntityInstance, RVTemplate, WorldModel
from psaw_mebn.dsl import parse_theory, parse_world
from psaw_mebn.grounding import SSBN, GroundNode


def load(name: str):
    """Parsed (theory, world, profile) for a bundled fixture."""
    theory = parse_theory(fixtures.read(f"{name}.pmt"), f"{name}.pmt")
    world = parse_world(fixtures.read(f"{fixtures.WORLDS[name]}.pw"), theory, f"{fixtures.WORLDS[name]}.pw")
    return theory, world, BUILTIN_PROFILES[fixtures.PROFILES[name]]


def danger_world_text(n_times: int, query: str | None = None, evidence: str = "") -> str:
    times = ", ".join(f"t{i}" for i in range(1, n_times + 1))
    query = query or f"DangerLevel(ci1, t{n_times})"
    return (
        "world Danger {\n  Target tr1;\n  CriticalInfrastructure ci1;\n"
        f"  time {times};\n  fact Approaching(tr1, ci1);\n{evidence}  query {query};\n}}\n"
    )


# Each mutant is one edit of a passing fixture: (fixture, old text, new text).
# ``old`` is replaced at every occurrence, so renaming an atom counts as one edit.
MUTANTS = {
    "UH-1": (
        "danger",
        "    input Speed(tr, t);\n",
        "    resident Speed(tr, t) : {Fast, Slow} kind TR { default -> (0.5, 0.5); }\n",
    ),
    "CYC-1": ("danger", "Speed(tr, pre_t)", "Speed(tr, t)"),
    "REC-1": ("danger", "    context Predecessor(pre_t, t);\n", ""),
    "CONF-EDGE": ("danger", "DangerLevel(ci, t) : {High, Low} kind SIT", "DangerLevel(ci, t) : {High, Low} kind OC"),
    "CONF-TIME": ("danger", "context Predecessor(pre_t, t);", "context Predecessor(t, pre_t);"),
    "CONF-OBS": ("prognos-subset", "    context ObserverOf(sr, sh);\n    resident SensorPerformance", "    resident SensorPerformance"),
    "CONF-ACT": ("prognos-subset", "    context sh = ActualObject(rpt);\n", ""),
}


def mutant_text(rule: str) -> str:
    name, old, new = MUTANTS[rule]
    text = fixtures.read(f"{name}.pmt")
    assert old in text, f"mutation anchor for {rule} not found"
    return text.replace(old, new)


def random_world(theory, world: WorldModel, rng: random.Random, max_per_type: int = 3, max_times: int = 6) -> WorldModel:
    """A random world over the fixture's entity types with random CTX facts.

    Queries are random ground atoms of stochastic residents; there is no
    evidence, so grounding never depends on evidence consistency.
    """
    instances = []
    by_type: dict[str, list[str]] = {}
    for et in theory.entity_types:
        count = rng.randint(1, max_times if et.ordered else max_per_type)
        prefix = et.name.lower()
        ids = [f"{prefix}{i}" for i in range(1, count + 1)]
        by_type[et.name] = ids
        instances += [EntityInstance(i, et.name, k if et.ordered else None) for k, i in enumerate(ids, 1)]
    facts = []
    stochastic = []
    for template in theory.templates().values():
        domains = [by_type[t] for t in template.arg_types]
        if template.deterministic:
            if template.name == "Predecessor":
                continue
            for args in _product(domains):
                if rng.random() < 0.5:
                    facts.append(Atom(template.name, args))
        else:
            stochastic.append((template, domains))
    queries = []
    for _ in range(rng.randint(1, 3)):
        template, domains = rng.choice(stochastic)
        queries.append(Atom(template.name, tuple(rng.choice(d) for d in domains)))
    return WorldModel(world.name, tuple(instances), tuple(facts), {}, tuple(dict.fromkeys(queries)))


def _product(domains):
    if not domains:
        yield ()
        return
    for head in domains[0]:
        for rest in _product(domains[1:]):
            yield (head, *rest)


def random_ssbn(rng: np.random.Generator, max_nodes: int = 12, max_states: int = 4, max_joint: int = 2**22) -> SSBN:
    """Random DAG with Dirichlet CPT rows; ids X00, X01, ... are already topological."""
    n = int(rng.integers(1, max_nodes + 1))
    cards = [int(rng.integers(2, max_states + 1)) for _ in range(n)]
    while math.prod(cards) > max_joint:
        cards[cards.index(max(cards))] -= 1
    nodes = []
    for i in range(n):
        parents = tuple(f"X{j:02d}" for j in range(i) if rng.random() < 0.35)[:4]
        states = tuple(f"s{k}" for k in range(cards[i]))
        rows = math.prod(cards[int(p[1:])] for p in parents)
        cpt = tuple(tuple(float(v) for v in row) for row in rng.dirichlet(np.ones(cards[i]), size=rows))
        nodes.append(GroundNode(f"X{i:02d}", RVTemplate(f"X{i:02d}", (), states, "TR"), parents, cpt, None))
    return SSBN(tuple(nodes), (nodes[-1].id,))


def random_evidence(ssbn: SSBN, rng: np.random.Generator, exclude: str | None = None) -> dict[str, str]:
    candidates = [n for n in ssbn.nodes if n.id != exclude]
    k = int(rng.integers(0, len(candidates) + 1)) if candidates else 0
    chosen = rng.choice(len(candidates), size=min(k, 4), replace=False) if k else []
    return {candidates[i].id: str(rng.choice(candidates[i].states)) for i in chosen}


def with_queries(world: WorldModel, *queries: Atom) -> WorldModel:
    return dataclasses.replace(world, queries=tuple(queries))
