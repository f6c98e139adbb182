import pytest

from psaw_mebn import fixtures
from psaw_mebn.diagnostics import ParseError
from psaw_mebn.core import MSAW, PSAW, LocalDistribution, ResidentNode
from psaw_mebn.dsl import parse_profile, parse_theory, serialize_profile
from psaw_mebn.validator import (
    check_conformance,
    check_recursion_wellformed,
    check_template_acyclic,
    check_unique_home,
    validate_all,
)

from helpers import MUTANTS, load, mutant_text


def danger_text(old: str, new: str) -> str:
    text = fixtures.read("danger.pmt")
    assert old in text
    return text.replace(old, new)


@pytest.mark.parametrize("name", fixtures.THEORIES)
def test_fixtures_pass_strict(name):
    theory, _, profile = load(name)
    report = validate_all(theory, profile, strict=True)
    assert report.passed, [str(d) for d in report.diagnostics]
    assert report.diagnostics == ()


def test_danger_individual_checks(danger):
    theory = danger[0]
    assert check_unique_home(theory) == []
    assert check_template_acyclic(theory) == []
    assert check_recursion_wellformed(theory) == []
    assert check_conformance(theory, PSAW) == []


def test_speed_in_two_homes():
    diagnostics = check_unique_home(parse_theory(mutant_text("UH-1")))
    assert [(d.code, "Speed" in d.message) for d in diagnostics] == [("UH-1", True)]


def test_input_without_home():
    text = danger_text("    input Speed(tr, t);\n", "    input Speed(tr, t);\n    input ReportedSpeed(tr, t);\n")
    text = text.replace("if any Speed(tr, t) == Fast -> (0.9, 0.1);", "if any Speed(tr, t) == Fast -> (0.9, 0.1);\n      if any ReportedSpeed(tr, t) == Fast -> (0.5, 0.5);")
    theory = parse_theory(text)
    assert [d.code for d in check_unique_home(theory)] == ["UH-2"]


TWO_CYCLE = """
mtheory Loop {
  entity E kind target;
  mfrag M group target {
    ov e : E;
    input B(e);
    resident A(e) : boolean kind TR { if any B(e) == true -> (0.9, 0.1); default -> (0.5, 0.5); }
  }
  mfrag N group target {
    ov e : E;
    input A(e);
    resident B(e) : boolean kind TR { if any A(e) == true -> (0.9, 0.1); default -> (0.5, 0.5); }
  }
}
"""


def test_two_cycle():
    diagnostics = check_template_acyclic(parse_theory(TWO_CYCLE))
    assert [d.code for d in diagnostics] == ["CYC-1"]
    assert "A -> B -> A" in diagnostics[0].message


def test_same_slice_self_loop():
    diagnostics = check_template_acyclic(parse_theory(mutant_text("CYC-1")))
    assert [d.code for d in diagnostics] == ["CYC-1"]
    assert "Speed -> Speed" in diagnostics[0].message


def test_recursion_without_predecessor():
    diagnostics = check_recursion_wellformed(parse_theory(mutant_text("REC-1")))
    assert [d.code for d in diagnostics] == ["REC-1"]


def test_predecessor_over_wrong_types():
    text = danger_text("context Predecessor(pre_t, t);", "context Predecessor(tr, t);")
    # the context template is typed (Time, Time), so the parser already rejects this
    with pytest.raises(ParseError) as info:
        parse_theory(text)
    assert [d.code for d in info.value.diagnostics] == ["PARSE-4"]


def test_vacuous_all_rule_is_a_valid_base_case():
    text = danger_text("if any Speed(tr, pre_t) == Fast", "if all Speed(tr, pre_t) == Fast")
    assert check_recursion_wellformed(parse_theory(text)) == []


def test_recursive_resident_without_default():
    theory = parse_theory(fixtures.read("danger.pmt"))
    target = theory.mfrags[1]
    res = target.residents[0]
    broken = ResidentNode(res.atom, res.template, LocalDistribution(res.lpd.rules, None))
    theory = _replace_resident(theory, 1, broken)
    assert [d.code for d in check_recursion_wellformed(theory)] == ["REC-2"]


def _replace_resident(theory, index, resident):
    import dataclasses

    mfrags = list(theory.mfrags)
    mfrags[index] = dataclasses.replace(mfrags[index], residents=(resident,))
    return dataclasses.replace(theory, mfrags=tuple(mfrags))


REPORT_TO_TARGET = """
mtheory Backwards {
  entity Target kind target;
  entity Report kind reported;
  mfrag Context group context {
    ov rs : Report;
    ov tr : Target;
    resident ActualObject(rs, tr) : boolean kind CTX deterministic;
  }
  mfrag Report group report {
    ov rs : Report;
    resident ReportedSpeed(rs) : {Fast, Slow} kind RT { default -> (0.5, 0.5); }
  }
  mfrag Target group target {
    ov tr : Target;
    ov rs : Report;
    context tr = ActualObject(rs);
    input ReportedSpeed(rs);
    resident Speed(tr) : {Fast, Slow} kind TR {
      if any ReportedSpeed(rs) == Fast -> (0.9, 0.1);
      default -> (0.5, 0.5);
    }
  }
}
"""


def test_report_to_target_edge():
    diagnostics = check_conformance(parse_theory(REPORT_TO_TARGET), PSAW)
    assert [d.code for d in diagnostics] == ["CONF-EDGE"]
    assert "ReportedSpeed(RT) -> Speed(TR)" in diagnostics[0].message


def test_backward_time_edge():
    codes = [d.code for d in check_conformance(parse_theory(mutant_text("CONF-TIME")), PSAW)]
    assert codes == ["CONF-TIME"]


def test_report_without_actual_object():
    diagnostics = check_conformance(parse_theory(mutant_text("CONF-ACT")), PSAW)
    assert [(d.code, d.severity.value) for d in diagnostics] == [("CONF-ACT", "warning")]


def test_observing_condition_without_observer():
    diagnostics = check_conformance(parse_theory(mutant_text("CONF-OBS")), PSAW)
    assert [(d.code, d.severity.value) for d in diagnostics] == [("CONF-OBS", "warning")]


def test_danger_under_msaw_fails(danger):
    report = validate_all(danger[0], MSAW)
    assert not report.passed
    assert set(report.codes) <= {"CONF-KIND", "CONF-EDGE"}
    assert "CONF-KIND" in report.codes


def test_missing_kind_is_reported():
    theory = parse_theory(
        "mtheory X { entity E kind target; mfrag M group target { ov e : E;"
        " resident A(e) : boolean { default -> (0.5, 0.5); } } }"
    )
    assert [d.code for d in check_conformance(theory, PSAW)] == ["CONF-KIND"]


def test_strict_promotes_warnings():
    theory = parse_theory(mutant_text("CONF-ACT"))
    assert validate_all(theory, PSAW).passed
    strict = validate_all(theory, PSAW, strict=True)
    assert not strict.passed
    assert [d.code for d in strict.errors] == ["CONF-ACT"]


def test_same_kind_recursion_flag():
    profile = parse_profile(serialize_profile(PSAW).replace("same_kind_recursion true", "same_kind_recursion false"))
    profile = parse_profile(serialize_profile(profile).replace("edge {SIT, TR} -> TR;", "edge {SIT} -> TR;"))
    diagnostics = check_conformance(load("danger")[0], profile)
    assert [d.code for d in diagnostics] == ["CONF-EDGE"]


@pytest.mark.parametrize("rule", sorted(MUTANTS))
def test_mutant_triggers_exactly_its_rule(rule):
    name = MUTANTS[rule][0]
    profile = load(name)[2]
    report = validate_all(parse_theory(mutant_text(rule)), profile)
    assert rule in report.codes
    assert {d.code for d in report.errors} <= {rule}


def test_validation_is_deterministic():
    theory = parse_theory(mutant_text("REC-1"))
    first = [d.to_dict() for d in validate_all(theory, PSAW).diagnostics]
    assert first == [d.to_dict() for d in validate_all(parse_theory(mutant_text("REC-1")), PSAW).diagnostics]
