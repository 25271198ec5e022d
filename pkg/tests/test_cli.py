"""CLI surface: flags, exit codes, output determinism."""

from __future__ import annotations

import json

from tracecause.cli import main

from conftest import ab_doc


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_doc(tmp_path, doc, name="sys.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return str(path)


# ---------------------------------------------------------------------------
# validate

def test_validate_ok(capsys, ab_files):
    system, _ = ab_files
    code, out, err = run_cli(capsys, "validate", system)
    assert code == 0
    assert "refinement holds" in out
    assert err == ""


def test_validate_json_ok(capsys, ab_files):
    system, _ = ab_files
    code, out, _ = run_cli(capsys, "validate", system, "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema_version"] == 1
    assert doc["status"] == "ok"
    assert doc["diagnostics"] == []


def test_validate_output_overlap_exits_1(capsys, tmp_path):
    doc = ab_doc()
    doc["variables"][0]["owner"] = "A"
    doc["components"][1]["outputs"] = ["y", "x"]
    code, _, err = run_cli(capsys, "validate", write_doc(tmp_path, doc))
    assert code == 1
    assert "output" in err


def test_validate_refinement_violation_exits_1(capsys, tmp_path):
    doc = ab_doc()
    doc["components"][1]["spec"]["edges"] = [
        {"from": "g", "guard": "true", "to": "g"}]
    doc["global_spec"]["edges"] = [
        {"from": "g", "guard": "!x & !y", "to": "g"}]
    code, _, err = run_cli(capsys, "validate", write_doc(tmp_path, doc))
    assert code == 1
    assert "refinement-violation" in err
    assert "witness" in err


def test_validate_malformed_guard_exits_2(capsys, tmp_path):
    doc = ab_doc()
    doc["components"][0]["spec"]["edges"][0]["guard"] = "x &"
    code, _, err = run_cli(capsys, "validate", write_doc(tmp_path, doc))
    assert code == 2
    assert "column 4" in err


def test_validate_bad_json_exits_2(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ nope")
    code, _, err = run_cli(capsys, "validate", str(path))
    assert code == 2
    assert "line 1" in err


# ---------------------------------------------------------------------------
# analyze

def test_analyze_mitigation(capsys, ab_files):
    system, trace = ab_files
    code, out, _ = run_cli(capsys, "analyze", system, trace,
                           "--mode", "mitigation")
    assert code == 0
    assert "faulty components: A (step 0), B (step 0)" in out
    assert "minimal mitigating (necessary-style) sets: {B}" in out


def test_analyze_universal_with_observed_full_model(capsys, ab_files):
    system, trace = ab_files
    code, out, _ = run_cli(capsys, "analyze", system, trace,
                           "--mode", "manifestation",
                           "--quantifier", "universal",
                           "--model", "A=observed")
    assert code == 0
    assert "minimal manifesting (sufficient-style) sets: {B}" in out


def test_analyze_both_modes_json(capsys, ab_files):
    system, trace = ab_files
    code, out, _ = run_cli(capsys, "analyze", system, trace, "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["violation"]["global_violation_index"] == 0
    assert [f["component"] for f in doc["violation"]["faulty"]] == ["A", "B"]
    assert [a["mode"] for a in doc["analyses"]] == ["mitigation",
                                                    "manifestation"]
    assert doc["analyses"][0]["minimal"] == [["B"]]
    assert doc["analyses"][0]["role"] == "mitigating (necessary-style)"
    witness = doc["analyses"][0]["verdicts"][0]["witness"]
    assert witness == [{"x": 1, "y": 1}]


def test_analyze_conforming_trace_exits_4(capsys, ab_files, tmp_path):
    system, _ = ab_files
    good = tmp_path / "good.txt"
    good.write_text("x=0 y=0\n")
    code, _, err = run_cli(capsys, "analyze", system, str(good))
    assert code == 4
    assert "not an error trace" in err


def test_analyze_no_causal_set_exits_3(capsys, ab_files):
    system, trace = ab_files
    code, out, _ = run_cli(capsys, "analyze", system, trace,
                           "--mode", "mitigation",
                           "--cf", "A=arbitrary", "--cf", "B=arbitrary")
    assert code == 3
    assert "sets: none" in out


def test_analyze_unknown_component_exits_2(capsys, ab_files):
    system, trace = ab_files
    code, _, err = run_cli(capsys, "analyze", system, trace,
                           "--model", "Z=spec")
    assert code == 2
    assert "unknown component" in err


def test_analyze_unknown_kind_exits_2(capsys, ab_files):
    system, trace = ab_files
    code, _, err = run_cli(capsys, "analyze", system, trace,
                           "--model", "A=bogus")
    assert code == 2
    assert "unknown fault-model kind" in err


def test_analyze_horizon_truncates(capsys, ab_files, tmp_path):
    system, _ = ab_files
    trace = tmp_path / "two.txt"
    trace.write_text("x=1 y=1\nx=0 y=0\n")
    code, out, _ = run_cli(capsys, "analyze", system, str(trace),
                           "--mode", "mitigation", "--horizon", "1")
    assert code == 0
    assert "trace: 1 step(s)" in out
    code, _, err = run_cli(capsys, "analyze", system, str(trace),
                           "--horizon", "5")
    assert code == 2
    assert "horizon" in err.lower()
    # truncating to the empty trace leaves nothing to explain
    code, _, err = run_cli(capsys, "analyze", system, str(trace),
                           "--horizon", "0")
    assert code == 4


def test_analyze_minimal_only(capsys, ab_files):
    system, trace = ab_files
    code, out, _ = run_cli(capsys, "analyze", system, trace,
                           "--mode", "mitigation", "--minimal-only")
    assert code == 0
    assert "{A,B}" not in out
    assert "minimal mitigating (necessary-style) sets: {B}" in out


def test_analyze_invalid_system_exits_1(capsys, ab_files, tmp_path):
    doc = ab_doc()
    doc["components"][1]["spec"]["edges"] = [
        {"from": "g", "guard": "true", "to": "g"}]
    doc["global_spec"]["edges"] = [
        {"from": "g", "guard": "!x & !y", "to": "g"}]
    system = write_doc(tmp_path, doc)
    _, trace = ab_files
    code, _, err = run_cli(capsys, "analyze", system, trace)
    assert code == 1
    assert "refinement-violation" in err


def test_analyze_missing_file_exits_2(capsys, ab_files):
    system, _ = ab_files
    code, _, err = run_cli(capsys, "analyze", system, "/nonexistent/tr.txt")
    assert code == 2


def test_analyze_byte_identical_runs(capsys, ab_files):
    system, trace = ab_files
    outputs = []
    for _ in range(2):
        _, out, _ = run_cli(capsys, "analyze", system, trace, "--json")
        outputs.append(out)
    assert outputs[0] == outputs[1]
    for _ in range(2):
        _, out, _ = run_cli(capsys, "analyze", system, trace)
        outputs.append(out)
    assert outputs[2] == outputs[3]


# ---------------------------------------------------------------------------
# stats

def test_stats_text(capsys, ab_files):
    system, trace = ab_files
    code, out, _ = run_cli(capsys, "stats", system, trace,
                           "--mode", "mitigation")
    assert code == 0
    assert "worst-case evaluations 4" in out
    assert "subsets: evaluated=4 pruned=0" in out


def test_stats_json_bounds(capsys, ab_files):
    system, trace = ab_files
    code, out, _ = run_cli(capsys, "stats", system, trace, "--json")
    assert code == 0
    doc = json.loads(out)
    for analysis in doc["analyses"]:
        assert analysis["subsets"]["evaluated"] <= \
            analysis["complexity"]["worst_case_evaluations"]
        for row in analysis["per_set"]:
            assert row["operand_states"] <= row["factor_bound"]


def test_stats_single_universal_component(capsys, tmp_path):
    doc = {
        "variables": [{"name": "o", "owner": "C"}],
        "components": [{
            "name": "C", "inputs": [], "outputs": ["o"],
            "spec": {"states": ["g"], "initial": "g", "bad": [],
                     "edges": [{"from": "g", "guard": "!o", "to": "g"}]}}],
        "global_spec": {"states": ["g"], "initial": "g", "bad": [],
                        "edges": [{"from": "g", "guard": "!o", "to": "g"}]},
    }
    system = write_doc(tmp_path, doc)
    trace = tmp_path / "tr.txt"
    trace.write_text("o=1\n")
    code, out, _ = run_cli(capsys, "stats", system, str(trace),
                           "--mode", "mitigation", "--cf", "C=arbitrary",
                           "--json")
    assert code == 0
    doc = json.loads(out)
    rows = doc["analyses"][0]["per_set"]
    # a single universal factor gives a one-state operand product
    full = next(r for r in rows if r["set"] == ["C"])
    assert full["operand_states"] == 1
