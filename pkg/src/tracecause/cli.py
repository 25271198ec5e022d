"""Command-line frontend: validate systems, analyze error traces, report
work statistics.

Exit codes: 0 success (for analyze: at least one causal set found),
1 validation failure, 2 parse/schema/usage error, 3 no causal set,
4 the trace does not violate the global spec.  Reports go to stdout,
diagnostics to stderr; all output is byte-deterministic for identical
inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .automata import Trace
from .counterfactual import FaultModelKind, ModelAssignment
from .engine import CauseReport, EnumerationStats, enumerate_with_stats
from .errors import (HorizonMismatch, NotAnErrorTrace, ParseError,
                     SchemaError, UnknownComponent, ValidationError)
from .model import (SystemModel, faulty_components, parse_system, parse_trace,
                    validate_system, violates_global)

SCHEMA_VERSION = 1

_ROLES = {"mitigation": "mitigating (necessary-style)",
          "manifestation": "manifesting (sufficient-style)"}


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _print_json(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _witness_text(t: Optional[Trace]) -> str:
    if t is None:
        return "-"
    if len(t) == 0:
        return "(empty trace)"
    return " | ".join(step.to_text() for step in t)


def _trace_jsonable(t: Optional[Trace]):
    if t is None:
        return None
    return [dict(step.items()) for step in t]


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*headers).rstrip()]
    for row in rows:
        lines.append(fmt.format(*row).rstrip())
    return lines


# ---------------------------------------------------------------------------
# shared loading steps

def _load_system(args) -> SystemModel:
    return parse_system(_read_file(args.system))


def _load_trace(args, m: SystemModel) -> Trace:
    tr = parse_trace(_read_file(args.trace), m.variables)
    if args.horizon is not None:
        if not 0 <= args.horizon <= len(tr):
            raise HorizonMismatch(
                f"--horizon {args.horizon} is outside the trace length "
                f"{len(tr)}")
        tr = tr[:args.horizon]
    return tr


def _parse_kind_option(option: str, value: str) -> tuple[str, FaultModelKind]:
    name, sep, kind = value.partition("=")
    if not sep or not name or not kind:
        raise ValueError(f"{option} expects NAME=KIND, got {value!r}")
    return name, FaultModelKind.from_name(kind)


def _build_assignment(args, m: SystemModel) -> ModelAssignment:
    asg = ModelAssignment.defaults(m)
    for value in args.model or ():
        name, kind = _parse_kind_option("--model", value)
        asg = asg.override(name, fault_kind=kind)
    for value in args.cf or ():
        name, kind = _parse_kind_option("--cf", value)
        asg = asg.override(name, cf_kind=kind)
    return asg


def _validation_diags(m: SystemModel):
    return validate_system(m)


def _diag_jsonable(d) -> dict:
    return {"kind": d.kind, "subject": d.subject, "message": d.message,
            "witness": _trace_jsonable(d.witness)}


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args) -> int:
    try:
        m = _load_system(args)
    except (ParseError, SchemaError) as e:
        _err(f"error: {e}")
        return 2
    except ValidationError as e:
        if args.json:
            diags = [_diag_jsonable(d) for d in e.diagnostics] or [
                {"kind": "validation-error", "subject": "system",
                 "message": str(e), "witness": None}]
            _print_json({"schema_version": SCHEMA_VERSION,
                         "command": "validate", "status": "invalid",
                         "diagnostics": diags})
        _err(f"invalid: {e}")
        return 1
    diags = _validation_diags(m)
    if args.json:
        _print_json({"schema_version": SCHEMA_VERSION, "command": "validate",
                     "status": "ok" if not diags else "invalid",
                     "diagnostics": [_diag_jsonable(d) for d in diags]})
    elif not diags:
        print(f"ok: {len(m.components)} component(s), "
              f"{len(m.variables)} variable(s), refinement holds")
    for d in diags:
        witness = (f"; witness: {_witness_text(d.witness)}"
                   if d.witness is not None else "")
        _err(f"{d.kind}: {d.message}{witness}")
    return 0 if not diags else 1


def _prepare_analysis(args):
    """Common analyze/stats pipeline; returns (exit_code, payload)."""
    try:
        m = _load_system(args)
    except (ParseError, SchemaError) as e:
        _err(f"error: {e}")
        return 2, None
    except ValidationError as e:
        _err(f"invalid: {e}")
        return 1, None
    diags = _validation_diags(m)
    if diags:
        for d in diags:
            _err(f"{d.kind}: {d.message}")
        return 1, None
    try:
        tr = _load_trace(args, m)
        asg = _build_assignment(args, m)
    except (ParseError, HorizonMismatch, ValueError) as e:
        _err(f"error: {e}")
        return 2, None
    except UnknownComponent as e:
        _err(f"error: unknown component {e}")
        return 2, None
    if violates_global(m, tr).accepted:
        _err("not an error trace: the global spec accepts it")
        return 4, None
    return 0, (m, tr, asg)


def _run_analyses(args, m, tr, asg) -> list[tuple[CauseReport, EnumerationStats]]:
    modes = ["mitigation", "manifestation"] if args.mode == "both" else [args.mode]
    out = []
    for mode in modes:
        out.append(enumerate_with_stats(
            m, tr, mode, asg, quantifier=args.quantifier,
            minimal_only=args.minimal_only,
            allow_nonfaulty=args.allow_nonfaulty))
    return out


def _report_lines(report: CauseReport) -> list[str]:
    lines = [""]
    quantifier = f" ({report.quantifier})" if report.quantifier else ""
    lines.append(f"analysis: {report.mode}{quantifier}")
    lines.append("candidates: " + (", ".join(report.candidates) or "none"))
    rows = []
    witnesses = []
    for cs, v in report.verdicts:
        rows.append([str(cs), "yes" if v.holds else "no",
                     "yes" if v.vacuous else "no",
                     str(v.operand_stats.states), str(v.operand_stats.edges)])
        if v.witness is not None:
            witnesses.append(f"witness {cs}: {_witness_text(v.witness)}")
    if rows:
        lines.extend(_table(["set", "holds", "vacuous", "states", "edges"],
                            rows))
    lines.extend(witnesses)
    for note in report.notes:
        lines.append(f"note: {note}")
    minimal = ", ".join(str(s) for s in report.minimal) or "none"
    lines.append(f"minimal {_ROLES[report.mode]} sets: {minimal}")
    return lines


def cmd_analyze(args) -> int:
    code, payload = _prepare_analysis(args)
    if payload is None:
        return code
    m, tr, asg = payload
    vio = faulty_components(m, tr)
    results = _run_analyses(args, m, tr, asg)
    reports = [r for r, _ in results]
    if args.json:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "analyze",
            "trace_length": len(tr),
            "violation": {
                "global_violation_index": vio.global_violation_index,
                "faulty": [{"component": n, "first_violation_index": i}
                           for n, i in vio.faulty],
            },
            "analyses": [dict(r.to_dict(), role=_ROLES[r.mode])
                         for r in reports],
        }
        _print_json(doc)
    else:
        lines = [f"trace: {len(tr)} step(s); global spec violated at "
                 f"step {vio.global_violation_index}"]
        faulty = ", ".join(f"{n} (step {i})" for n, i in vio.faulty) or "none"
        lines.append(f"faulty components: {faulty}")
        for r in reports:
            lines.extend(_report_lines(r))
        print("\n".join(lines))
    return 0 if any(r.minimal for r in reports) else 3


def cmd_stats(args) -> int:
    code, payload = _prepare_analysis(args)
    if payload is None:
        return code
    m, tr, asg = payload
    results = _run_analyses(args, m, tr, asg)
    if args.json:
        analyses = []
        for report, stats in results:
            analyses.append({
                "mode": report.mode,
                "quantifier": report.quantifier,
                "candidates": list(report.candidates),
                "complexity": report.to_dict()["complexity"],
                "subsets": {"evaluated": stats.evaluated,
                            "pruned": stats.pruned,
                            "monotone_pruning": stats.monotone_pruning},
                "per_set": [
                    {"set": list(r.members), "operand_states": r.operand_states,
                     "operand_edges": r.operand_edges,
                     "factor_bound": r.factor_bound,
                     "pairs_explored": r.pairs_explored,
                     "bfs_depth": r.bfs_depth}
                    for r in stats.per_set
                ],
            })
        _print_json({"schema_version": SCHEMA_VERSION, "command": "stats",
                     "trace_length": len(tr), "analyses": analyses})
    else:
        lines = []
        for report, stats in results:
            quantifier = f" ({report.quantifier})" if report.quantifier else ""
            lines.append(f"analysis: {report.mode}{quantifier}")
            c = report.complexity
            lines.append(
                f"candidates: {', '.join(report.candidates) or 'none'} "
                f"(k={c.candidates}; worst-case evaluations "
                f"{c.worst_case_evaluations}; components {c.components})")
            rows = [[ "{" + ",".join(r.members) + "}",
                      str(r.operand_states), str(r.operand_edges),
                      str(r.factor_bound), str(r.pairs_explored),
                      str(r.bfs_depth)]
                    for r in stats.per_set]
            lines.extend(_table(
                ["set", "states", "edges", "bound", "pairs", "depth"], rows))
            lines.append(f"subsets: evaluated={stats.evaluated} "
                         f"pruned={stats.pruned} monotone_pruning="
                         f"{'on' if stats.monotone_pruning else 'off'}")
            lines.append("")
        print("\n".join(lines).rstrip())
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("trace", help="trace file (var=0|1 tokens, one step per line)")
    p.add_argument("--mode", choices=["mitigation", "manifestation", "both"],
                   default="both")
    p.add_argument("--quantifier", choices=["existential", "universal"],
                   default="existential",
                   help="manifestation only: some vs. every completion")
    p.add_argument("--model", action="append", metavar="NAME=KIND",
                   help="fault model for a component when it is outside the "
                        "candidate set (repeatable)")
    p.add_argument("--cf", action="append", metavar="NAME=KIND",
                   help="counterfactual model for a component when it is "
                        "inside the candidate set (repeatable)")
    p.add_argument("--minimal-only", action="store_true",
                   help="report only the minimal causal sets")
    p.add_argument("--allow-nonfaulty", action="store_true",
                   help="let candidate sets include components that satisfy "
                        "their local specs")
    p.add_argument("--horizon", type=int, default=None, metavar="N",
                   help="analyze only the first N steps of the trace")
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracecause",
        description="Decide which components of a concurrent reactive "
                    "system caused an observed safety violation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser(
        "validate", help="parse a system file and check the refinement "
                         "obligation")
    p_validate.add_argument("system", help="system file (JSON)")
    p_validate.add_argument("--json", action="store_true")
    p_validate.set_defaults(func=cmd_validate)

    p_analyze = sub.add_parser(
        "analyze", help="compute causal component sets for an error trace")
    p_analyze.add_argument("system", help="system file (JSON)")
    _add_analysis_flags(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_stats = sub.add_parser(
        "stats", help="report product sizes and enumeration work for the "
                      "same analyses")
    p_stats.add_argument("system", help="system file (JSON)")
    _add_analysis_flags(p_stats)
    p_stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotAnErrorTrace as e:
        _err(f"not an error trace: {e}")
        return 4
    except OSError as e:
        _err(f"error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
