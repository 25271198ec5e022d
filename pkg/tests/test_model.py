"""System/trace parsing, serialization, validation and violation detection."""

from __future__ import annotations

import random

import pytest

from tracecause.automata import Trace, Valuation, run
from tracecause.errors import (DomainMismatch, DuplicateAssignment,
                               MissingVariable, ParseError, SchemaError,
                               UnknownVariable, ValidationError)
from tracecause.model import (Component, SystemModel, faulty_components,
                              parse_system, parse_trace, project_trace,
                              serialize_system, system_from_dict,
                              validate_system, violates_global)

from conftest import ab_doc, always_zero
from randsys import random_system


def T(*steps) -> Trace:
    return Trace(Valuation(s) for s in steps)


# ---------------------------------------------------------------------------
# system parsing

def test_parse_fixture_structure(ab_model):
    assert [c.name for c in ab_model.components] == ["A", "B"]
    assert ab_model.variables == {"x", "y"}
    assert ab_model.env_vars == frozenset()
    b = ab_model.component("B")
    assert b.inputs == {"x"} and b.outputs == {"y"}
    assert b.spec.var_set == {"x", "y"}


def test_parse_completes_missing_transitions_into_bad_sink(ab_model):
    spec = ab_model.component("A").spec
    assert spec.state_count == 2  # declared "g" plus the bad sink
    assert len(spec.bad) == 1
    # the completed automaton is exactly the "x always 0" monitor
    assert run(spec, T({"x": 0}, {"x": 0})).accepted
    assert not run(spec, T({"x": 1})).accepted


def test_complete_with_good_makes_unspecified_inputs_legal():
    doc = ab_doc()
    doc["components"][0]["spec"]["complete_with"] = "good"
    m = system_from_dict(doc)
    assert run(m.component("A").spec, T({"x": 1}, {"x": 1})).accepted


def test_output_overlap_rejected():
    doc = ab_doc()
    doc["variables"][0]["owner"] = "A"
    doc["components"][1]["outputs"] = ["y", "x"]
    with pytest.raises(ValidationError, match="output"):
        system_from_dict(doc)


def test_nondeterministic_component_spec_rejected():
    doc = ab_doc()
    doc["components"][0]["spec"]["edges"].append(
        {"from": "g", "guard": "!x", "to": "g"})
    doc["components"][0]["spec"]["states"] = ["g"]
    with pytest.raises(ValidationError, match="nondeterministic"):
        system_from_dict(doc)


def test_malformed_guard_is_parse_error_with_position():
    doc = ab_doc()
    doc["components"][0]["spec"]["edges"][0]["guard"] = "x &"
    with pytest.raises(ParseError) as e:
        system_from_dict(doc)
    assert e.value.column == 4
    assert "edges[0]" in str(e.value)


def test_schema_errors():
    with pytest.raises(SchemaError, match="missing field"):
        system_from_dict({"variables": []})
    doc = ab_doc()
    del doc["components"][0]["spec"]["initial"]
    with pytest.raises(SchemaError, match="initial"):
        system_from_dict(doc)
    doc = ab_doc()
    doc["components"][0]["spec"]["complete_with"] = "maybe"
    with pytest.raises(SchemaError, match="complete_with"):
        system_from_dict(doc)


def test_undeclared_guard_variable_rejected():
    doc = ab_doc()
    doc["components"][0]["spec"]["edges"][0]["guard"] = "!x & !y"
    with pytest.raises(ValidationError, match="undeclared"):
        system_from_dict(doc)


def test_unused_declared_variable_rejected():
    doc = ab_doc()
    doc["variables"].append({"name": "z", "owner": "env"})
    with pytest.raises(ValidationError, match="declared but neither"):
        system_from_dict(doc)


def test_owner_consistency_checked():
    doc = ab_doc()
    doc["variables"][0]["owner"] = "B"
    with pytest.raises(ValidationError, match="owner"):
        system_from_dict(doc)


def test_parse_system_reports_json_position():
    with pytest.raises(ParseError) as e:
        parse_system("{ not json")
    assert e.value.line == 1 and e.value.column is not None


def test_env_inputs_are_allowed():
    doc = ab_doc()
    doc["variables"].append({"name": "e", "owner": "env"})
    doc["components"][0]["inputs"] = ["e"]
    doc["components"][0]["spec"]["edges"][0]["guard"] = "!x"
    m = system_from_dict(doc)
    assert m.env_vars == {"e"}
    assert m.variables == {"x", "y", "e"}


# ---------------------------------------------------------------------------
# trace parsing

def test_parse_trace_examples(ab_model):
    t = parse_trace("x=1 y=1", ab_model.variables)
    assert t == T({"x": 1, "y": 1})
    assert parse_trace("", ab_model.variables) == Trace([])
    assert parse_trace("# comment\n\n y=0 x=0\n", ab_model.variables) == \
        T({"x": 0, "y": 0})


def test_parse_trace_accepts_crlf(ab_model):
    t = parse_trace("x=1 y=1\r\nx=0 y=0\r\n", ab_model.variables)
    assert t == T({"x": 1, "y": 1}, {"x": 0, "y": 0})


def test_parse_trace_errors(ab_model):
    with pytest.raises(MissingVariable) as e:
        parse_trace("x=1", ab_model.variables)
    assert e.value.line == 1 and "'y'" in str(e.value)
    with pytest.raises(UnknownVariable):
        parse_trace("x=1 y=0 z=0", ab_model.variables)
    with pytest.raises(DuplicateAssignment):
        parse_trace("x=1 x=1 y=0", ab_model.variables)
    with pytest.raises(ParseError, match="var=0"):
        parse_trace("x=2 y=0", ab_model.variables)


# ---------------------------------------------------------------------------
# projections and violations

def test_project_trace_examples(ab_model):
    a = ab_model.component("A")
    b = ab_model.component("B")
    t = T({"x": 1, "y": 1})
    assert project_trace(t, a) == T({"x": 1})
    assert project_trace(Trace([]), a) == Trace([])
    two = T({"x": 0, "y": 1}, {"x": 1, "y": 0})
    assert project_trace(two, b) == two  # full-scope projection is identity
    with pytest.raises(DomainMismatch):
        project_trace(T({"x": 1}), b)


def test_projection_preserves_length(ab_model):
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(0, 4)
        t = T(*({"x": rng.randint(0, 1), "y": rng.randint(0, 1)}
                for _ in range(n)))
        for c in ab_model.components:
            assert len(project_trace(t, c)) == len(t)


def test_violates_global_examples(ab_model):
    r = violates_global(ab_model, T({"x": 1, "y": 1}))
    assert (r.accepted, r.first_violation_index) == (False, 0)
    assert violates_global(ab_model, T({"x": 1, "y": 0})).accepted
    assert violates_global(ab_model, Trace([])).accepted


def test_faulty_components_examples(ab_model):
    rep = faulty_components(ab_model, T({"x": 1, "y": 1}))
    assert rep.faulty == (("A", 0), ("B", 0))
    assert rep.global_violation_index == 0
    assert faulty_components(ab_model, T({"x": 0, "y": 0})).faulty == ()
    rep = faulty_components(ab_model, T({"x": 0, "y": 0}, {"x": 1, "y": 0}))
    assert rep.faulty == (("A", 1),)
    assert rep.global_violation_index is None


# ---------------------------------------------------------------------------
# refinement check

def test_validate_fixture_holds(ab_model):
    assert validate_system(ab_model) == []


def test_validate_reports_witness_on_refinement_violation():
    doc = ab_doc()
    # θ demands x and y stay 0 but B's spec no longer constrains y
    doc["global_spec"] = {
        "states": ["g"], "initial": "g", "bad": [],
        "edges": [{"from": "g", "guard": "!x & !y", "to": "g"}]}
    doc["components"][1]["spec"] = {
        "states": ["g"], "initial": "g", "bad": [],
        "edges": [{"from": "g", "guard": "true", "to": "g"}]}
    m = system_from_dict(doc)
    diags = validate_system(m)
    assert [d.kind for d in diags] == ["refinement-violation"]
    witness = diags[0].witness
    assert witness is not None and witness[0]["y"] == 1
    assert not run(m.global_spec, witness).accepted


def test_validate_single_component_reflexive():
    spec = always_zero("x")
    m = SystemModel((Component("A", frozenset(), frozenset(["x"]), spec),),
                    always_zero("x"))
    assert validate_system(m) == []


def test_refinement_implies_global_acceptance_randomized():
    rng = random.Random(17)
    checked = 0
    for _ in range(120):
        m = random_system(rng, refinement_holds=True)
        assert validate_system(m) == []
        for _ in range(6):
            n = rng.randint(0, 3)
            from randsys import random_trace
            t = random_trace(rng, m.variables, n)
            if all(run(c.spec, project_trace(t, c)).accepted
                   for c in m.components):
                assert violates_global(m, t).accepted
                checked += 1
    assert checked > 50


# ---------------------------------------------------------------------------
# serialization

def test_serialize_parse_fixpoint_fixture(ab_model):
    text1 = serialize_system(ab_model)
    m1 = parse_system(text1)
    assert m1 == ab_model
    assert serialize_system(m1) == text1


def test_serialize_parse_fixpoint_randomized():
    rng = random.Random(23)
    for _ in range(40):
        m = random_system(rng, refinement_holds=rng.random() < 0.5)
        text1 = serialize_system(m)
        m1 = parse_system(text1)
        text2 = serialize_system(m1)
        assert text1 == text2
        assert parse_system(text2) == m1


def test_serialization_is_byte_deterministic(ab_model):
    doc = ab_doc()
    assert serialize_system(system_from_dict(doc)) == \
        serialize_system(system_from_dict(doc))
