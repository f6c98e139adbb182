import networkx as nx
import pytest

from psaw_mebn.core import (
    MSAW,
    PSAW,
    Atom,
    ContextConstraint,
    EdgeRelation,
    home_mfrag,
    is_normalized,
    state_index,
    template_dependency_graph,
)
from psaw_mebn.diagnostics import MultipleHomes, NotFound, UnknownState
from psaw_mebn.dsl import parse_theory
from psaw_mebn import fixtures

from helpers import load, mutant_text

REPORT_THEORY = """
mtheory Reports {
  entity Target kind target;
  entity Report kind reported;
  mfrag Context group context {
    ov rs : Report;
    ov tr : Target;
    resident ActualObject(rs, tr) : boolean kind CTX deterministic;
  }
  mfrag Target group target {
    ov tr : Target;
    resident Speed(tr) : {Fast, Slow} kind TR { default -> (0.5, 0.5); }
    resident Capability(tr) : {High, Low} kind TR { default -> (0.5, 0.5); }
  }
  mfrag Report group report {
    ov rs : Report;
    ov tr : Target;
    context tr = ActualObject(rs);
    input Speed(tr);
    input Capability(tr);
    resident ReportedSpeed(rs) : {Fast, Slow} kind RT {
      if any Speed(tr) == Fast -> (0.9, 0.1);
      if any Capability(tr) == High -> (0.5, 0.5);
      default -> (0.2, 0.8);
    }
  }
}
"""


def test_atom_forms():
    atom = Atom("Speed", ("tr1", "t1"))
    assert str(atom) == "Speed(tr1,t1)"
    assert atom.label == "Speed_tr1_t1"
    assert Atom("Speed", ("tr", "t")).substitute({"tr": "tr1", "t": "t2"}) == Atom("Speed", ("tr1", "t2"))


def test_equality_context_is_stored_as_relation():
    ctx = ContextConstraint(Atom("ActualObject", ("rs",)), equals="tr")
    assert ctx.relation == Atom("ActualObject", ("rs", "tr"))
    assert set(ctx.ovs) == {"rs", "tr"}


def test_home_mfrag_danger(danger):
    theory, _, _ = danger
    assert home_mfrag(theory, "Speed").name == "Target"
    assert home_mfrag(theory, "Predecessor").name == "Context"
    assert home_mfrag(theory, "DangerLevel").name == "Situation"


def test_home_mfrag_is_idempotent(danger):
    theory, _, _ = danger
    for name in theory.templates():
        assert home_mfrag(theory, name) is home_mfrag(theory, name)


def test_home_mfrag_multiple_homes():
    theory = parse_theory(mutant_text("UH-1"))
    with pytest.raises(MultipleHomes) as info:
        home_mfrag(theory, "Speed")
    assert info.value.code == "UH-1"


def test_home_mfrag_unknown(danger):
    with pytest.raises(NotFound):
        home_mfrag(danger[0], "Altitude")


def test_state_index(danger):
    speed = danger[0].templates()["Speed"]
    assert state_index(speed, "Fast") == 0
    assert state_index(speed, "Slow") == 1
    with pytest.raises(UnknownState):
        state_index(speed, "Medium")


def _edges(graph):
    return {(u, v, d["recursive"], d["sameSlice"]) for u, v, d in graph.edges(data=True)}


def test_dependency_graph_danger(danger):
    graph = template_dependency_graph(danger[0])
    assert _edges(graph) == {
        ("Speed", "Speed", True, False),
        ("Speed", "DangerLevel", False, True),
    }


def test_dependency_graph_without_inputs():
    theory = parse_theory(
        "mtheory X { entity E kind target; mfrag M group target { ov e : E;"
        " resident A(e) : boolean kind TR { default -> (0.5, 0.5); } } }"
    )
    graph = template_dependency_graph(theory)
    assert graph.number_of_edges() == 0
    assert set(graph.nodes) == {"A"}


def test_dependency_graph_report_inputs():
    graph = template_dependency_graph(parse_theory(REPORT_THEORY))
    assert _edges(graph) == {
        ("Speed", "ReportedSpeed", False, True),
        ("Capability", "ReportedSpeed", False, True),
    }


@pytest.mark.parametrize("name", fixtures.THEORIES)
def test_fixture_graph_is_acyclic_without_recursive_edges(name):
    graph = template_dependency_graph(load(name)[0])
    same_slice = nx.DiGraph((u, v) for u, v, d in graph.edges(data=True) if not d["recursive"])
    assert nx.is_directed_acyclic_graph(same_slice)


@pytest.mark.parametrize("name", fixtures.THEORIES)
def test_fixture_distributions_are_normalized(name):
    theory = load(name)[0]
    for mfrag in theory.mfrags:
        for res in mfrag.residents:
            if res.lpd is None:
                continue
            for dist in [r.dist for r in res.lpd.rules] + [res.lpd.default]:
                assert is_normalized(dist)
                assert len(dist) == len(res.template.states)


def test_psaw_profile_table():
    assert PSAW.allowed_edges == {
        ("OC", "OC"),
        ("OC", "RT"), ("TR", "RT"),
        ("TR", "TR"), ("SIT", "TR"),
        ("SIT", "SIT"), ("TR", "SIT"),
    }


def test_msaw_profile_table():
    assert MSAW.allowed_edges == {
        ("OC", "OC"),
        ("SYS", "RSYS"), ("OC", "RSYS"),
        ("IT", "RIT"), ("OC", "RIT"),
        ("IT", "SYS"),
        ("SYS", "IT"), ("IT", "IT"),
        ("SYS", "SIT"), ("IT", "SIT"),
    }


def test_edge_classification(danger):
    from psaw_mebn.core import dependency_edges

    relations = {(e.parent, e.child): e.relation for e in dependency_edges(danger[0])}
    assert relations[("Speed", "Speed")] is EdgeRelation.RECURSIVE
    assert relations[("Speed", "DangerLevel")] is EdgeRelation.SAME_SLICE
    backward = {(e.parent, e.child): e.relation for e in dependency_edges(parse_theory(mutant_text("CONF-TIME")))}
    assert backward[("Speed", "Speed")] is EdgeRelation.BACKWARD
