"""Causality analyses over an observed error trace.

Two counterfactual questions are asked of a candidate component set D:

* mitigation - if the components in D behaved per their counterfactual
  language (spec, by default) while everyone else followed their fault
  model (observed outputs, by default), would the global spec hold
  against *all* such behaviors, at every finite length?  Minimal
  mitigating sets play the necessary-cause role.

* manifestation - the mirror image: components in D keep their fault
  model while everyone else is corrected.  Existentially, does some such
  behavior still violate the global spec?  Universally, does *every*
  such behavior of the observed length violate it?  Minimal manifesting
  sets play the sufficient-cause role.

Mitigation containment is over all finite lengths (corrected components
must keep the system safe forever against the modeled faults), while
manifestation is bounded at the error-trace length, where "observed
behavior" is meaningful.  A universal verdict additionally requires the
combined language to be realizable at that length; an unrealizable
operand yields holds=False with vacuous=True rather than a vacuous truth.

Everything here is a pure function of immutable inputs; candidate sets
could be evaluated concurrently, but results are reduced in the fixed
size-then-lexicographic order so reports are byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import prod
from typing import Iterable, Optional, Union

from .automata import (SafetyAutomaton, Trace, contains,
                       find_trace_of_length, has_joint_trace_of_length,
                       has_trace_of_length, product)
from .counterfactual import FaultModelKind, ModelAssignment, build_fault_model
from .errors import NotAnErrorTrace, UnknownComponent
from .model import (SystemModel, faulty_components, project_trace,
                    violates_global)

MODES = ("mitigation", "manifestation")
QUANTIFIERS = ("existential", "universal")


@dataclass(frozen=True)
class CandidateSet:
    """A set of component names suspected of being liable."""
    members: frozenset[str]

    @classmethod
    def of(cls, names: Iterable[str]) -> "CandidateSet":
        return cls(frozenset(names))

    @property
    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))

    @property
    def sort_key(self) -> tuple:
        return (len(self.members), self.sorted_members)

    def __contains__(self, name: str) -> bool:
        return name in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(self.sorted_members) + "}"


Candidates = Union[CandidateSet, Iterable[str]]


@dataclass(frozen=True)
class OperandStats:
    """Size of the constructed operand product."""
    states: int
    edges: int


@dataclass(frozen=True)
class Verdict:
    """Outcome of one mitigation/manifestation query.

    ``witness`` is a trace accepted by the operand and rejected by the
    global spec: present when mitigation fails or existential
    manifestation holds (and, informatively, when a universal verdict
    holds).  ``vacuous`` reports that the operand admits no trace of the
    error-trace length; it flips a universal verdict to False and leaves
    the others untouched (their containment answer is genuine).
    """
    holds: bool
    witness: Optional[Trace]
    vacuous: bool
    operand_stats: OperandStats


@dataclass(frozen=True)
class SetMetrics:
    """Work done for one candidate set (reported by the stats command)."""
    members: tuple[str, ...]
    operand_states: int
    operand_edges: int
    factor_bound: int
    pairs_explored: int
    bfs_depth: int


@dataclass(frozen=True)
class ComplexityNote:
    """Worst-case work of the enumeration: 2^k predicate evaluations, each
    building a product of n component automata."""
    candidates: int
    worst_case_evaluations: int
    components: int


@dataclass(frozen=True)
class CauseReport:
    """Everything a causality query reports; byte-deterministic via
    `to_dict`.  Work counters live outside (in `EnumerationStats`) so that
    pruned and unpruned runs produce identical reports."""
    mode: str
    quantifier: Optional[str]
    assignment: dict
    candidates: tuple[str, ...]
    minimal_only: bool
    all_satisfying: Optional[tuple[CandidateSet, ...]]
    minimal: tuple[CandidateSet, ...]
    verdicts: tuple[tuple[CandidateSet, Verdict], ...]
    notes: tuple[str, ...]
    complexity: ComplexityNote

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "quantifier": self.quantifier,
            "assignment": self.assignment,
            "candidates": list(self.candidates),
            "minimal_only": self.minimal_only,
            "all_satisfying": (None if self.all_satisfying is None else
                               [list(s.sorted_members) for s in self.all_satisfying]),
            "minimal": [list(s.sorted_members) for s in self.minimal],
            "verdicts": [
                {
                    "set": list(cs.sorted_members),
                    "holds": v.holds,
                    "vacuous": v.vacuous,
                    "witness": _trace_to_jsonable(v.witness),
                    "operand_states": v.operand_stats.states,
                    "operand_edges": v.operand_stats.edges,
                }
                for cs, v in self.verdicts
            ],
            "notes": list(self.notes),
            "complexity": {
                "candidates": self.complexity.candidates,
                "worst_case_evaluations": self.complexity.worst_case_evaluations,
                "components": self.complexity.components,
            },
        }


@dataclass(frozen=True)
class EnumerationStats:
    evaluated: int
    pruned: int
    monotone_pruning: bool
    per_set: tuple[SetMetrics, ...]


def _trace_to_jsonable(t: Optional[Trace]):
    if t is None:
        return None
    return [dict(step.items()) for step in t]


def _check_error_trace(m: SystemModel, tr: Trace) -> None:
    if violates_global(m, tr).accepted:
        raise NotAnErrorTrace(
            "the global spec accepts this trace; there is no violation to "
            "explain")


def _normalize_members(m: SystemModel, d: Candidates) -> frozenset[str]:
    members = frozenset(d.members if isinstance(d, CandidateSet) else d)
    known = {c.name for c in m.components}
    unknown = members - known
    if unknown:
        raise UnknownComponent(sorted(unknown)[0])
    return members


def _cached_factor(cache: Optional[dict], c, kind: FaultModelKind,
                   tr: Trace) -> SafetyAutomaton:
    if cache is None:
        return build_fault_model(kind, c, project_trace(tr, c), len(tr))
    key = (c.name, kind)
    a = cache.get(key)
    if a is None:
        a = build_fault_model(kind, c, project_trace(tr, c), len(tr))
        cache[key] = a
    return a


def _factors(m: SystemModel, tr: Trace, members: frozenset[str],
             asg: ModelAssignment, corrected_in_set: bool,
             cache: Optional[dict]) -> list[SafetyAutomaton]:
    out = []
    for c in m.components:
        use_cf = (c.name in members) == corrected_in_set
        kind = asg.cf_kind(c.name) if use_cf else asg.fault_kind(c.name)
        out.append(_cached_factor(cache, c, kind, tr))
    return out


def mitigation_operand(m: SystemModel, tr: Trace, d: Candidates,
                       asg: Optional[ModelAssignment] = None) -> SafetyAutomaton:
    """The language of all global behaviors where the components in ``d``
    are counterfactually corrected and everyone else follows their fault
    model.  Guards stay over each component's own variables, so inverse
    projection onto the global alphabet is implicit."""
    asg = asg or ModelAssignment.defaults(m)
    members = _normalize_members(m, d)
    return product(_factors(m, tr, members, asg, True, None))


def manifestation_operand(m: SystemModel, tr: Trace, d: Candidates,
                          asg: Optional[ModelAssignment] = None) -> SafetyAutomaton:
    """Mirror image of `mitigation_operand`: ``d`` keeps its fault model,
    everyone else is corrected."""
    asg = asg or ModelAssignment.defaults(m)
    members = _normalize_members(m, d)
    return product(_factors(m, tr, members, asg, False, None))


def _evaluate(m: SystemModel, tr: Trace, members: frozenset[str],
              asg: ModelAssignment, mode: str, quantifier: Optional[str],
              cache: Optional[dict]) -> tuple[Verdict, SetMetrics]:
    corrected_in_set = mode == "mitigation"
    factors = _factors(m, tr, members, asg, corrected_in_set, cache)
    operand = product(factors)
    stats = OperandStats(operand.state_count, operand.edge_count)
    bound = prod(a.state_count for a in factors)
    h = len(tr)
    realizable = has_trace_of_length(operand, h)
    pairs = 0
    depth = 0
    if mode == "mitigation":
        res = contains(operand, m.global_spec)
        pairs, depth = res.pairs_explored, res.bfs_depth
        verdict = Verdict(res.holds, None if res.holds else res.witness,
                          not realizable, stats)
    elif quantifier == "existential":
        res = contains(operand, m.global_spec)
        pairs, depth = res.pairs_explored, res.bfs_depth
        holds = not res.holds
        verdict = Verdict(holds, res.witness if holds else None,
                          not realizable, stats)
    else:
        if not realizable:
            verdict = Verdict(False, None, True, stats)
        else:
            joint = has_joint_trace_of_length(operand, m.global_spec, h)
            holds = not joint
            witness = find_trace_of_length(operand, h) if holds else None
            verdict = Verdict(holds, witness, False, stats)
            depth = h
    metrics = SetMetrics(tuple(sorted(members)), stats.states, stats.edges,
                         bound, pairs, depth)
    return verdict, metrics


def mitigates(m: SystemModel, tr: Trace, d: Candidates,
              asg: Optional[ModelAssignment] = None) -> Verdict:
    """Does correcting ``d`` guarantee the global spec against the modeled
    faults of everyone else, at every finite length?"""
    _check_error_trace(m, tr)
    asg = asg or ModelAssignment.defaults(m)
    members = _normalize_members(m, d)
    verdict, _ = _evaluate(m, tr, members, asg, "mitigation", None, None)
    return verdict


def manifests(m: SystemModel, tr: Trace, d: Candidates,
              asg: Optional[ModelAssignment] = None,
              quantifier: str = "existential") -> Verdict:
    """Does the modeled faulty behavior of ``d`` produce a global violation
    even when everyone else behaves correctly?  ``quantifier`` picks
    between some completion ("existential") and all completions of the
    observed length ("universal")."""
    if quantifier not in QUANTIFIERS:
        raise ValueError(f"quantifier must be one of {QUANTIFIERS}")
    _check_error_trace(m, tr)
    asg = asg or ModelAssignment.defaults(m)
    members = _normalize_members(m, d)
    verdict, _ = _evaluate(m, tr, members, asg, "manifestation", quantifier,
                           None)
    return verdict


def minimal_antichain(sets: Iterable[Candidates]) -> list[CandidateSet]:
    """Drop every set that has a proper subset in the input; the result is
    sorted by size, then lexicographically by members."""
    unique = {frozenset(s.members if isinstance(s, CandidateSet) else s)
              for s in sets}
    keep = [s for s in unique if not any(o < s for o in unique)]
    return sorted((CandidateSet(s) for s in keep), key=lambda c: c.sort_key)


def _monotone_assignment(m: SystemModel, tr: Trace, asg: ModelAssignment,
                         cache: dict) -> bool:
    # Pruning is sound when growing the candidate set can only shrink
    # (mitigation) or grow (existential manifestation) the operand, i.e.
    # when each component's counterfactual language is contained in its
    # fault language.
    for c in m.components:
        cf = _cached_factor(cache, c, asg.cf_kind(c.name), tr)
        fault = _cached_factor(cache, c, asg.fault_kind(c.name), tr)
        if not contains(cf, fault).holds:
            return False
    return True


def enumerate_with_stats(m: SystemModel, tr: Trace, mode: str,
                         asg: Optional[ModelAssignment] = None,
                         quantifier: str = "existential",
                         minimal_only: bool = False,
                         allow_nonfaulty: bool = False,
                         prune: bool = True
                         ) -> tuple[CauseReport, EnumerationStats]:
    """`enumerate_causal_sets` plus the work counters the report must not
    contain (so that pruned and unpruned runs report identically)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if quantifier not in QUANTIFIERS:
        raise ValueError(f"quantifier must be one of {QUANTIFIERS}")
    _check_error_trace(m, tr)
    asg = asg or ModelAssignment.defaults(m)
    for c in m.components:
        asg.cf_kind(c.name)  # fail early on incomplete assignments

    if allow_nonfaulty:
        universe = sorted(c.name for c in m.components)
    else:
        universe = sorted(faulty_components(m, tr).faulty_names)
    k = len(universe)

    cache: dict = {}
    monotone = False
    if prune and (mode == "mitigation" or quantifier == "existential"):
        monotone = _monotone_assignment(m, tr, asg, cache)

    effective_quantifier = quantifier if mode == "manifestation" else None
    evaluated = 0
    pruned = 0
    satisfying: list[frozenset[str]] = []
    entries: list[tuple[CandidateSet, Verdict]] = []
    rows: list[SetMetrics] = []
    for size in range(k + 1):
        for combo in combinations(universe, size):
            members = frozenset(combo)
            if (minimal_only and monotone
                    and any(s < members for s in satisfying)):
                pruned += 1
                continue
            verdict, metrics = _evaluate(m, tr, members, asg, mode,
                                         effective_quantifier, cache)
            evaluated += 1
            entries.append((CandidateSet(members), verdict))
            rows.append(metrics)
            if verdict.holds:
                satisfying.append(members)

    minimal = tuple(minimal_antichain(CandidateSet(s) for s in satisfying))
    if minimal_only:
        wanted = {cs.members for cs in minimal}
        entries = [(cs, v) for cs, v in entries if cs.members in wanted]
        all_satisfying = None
    else:
        all_satisfying = tuple(CandidateSet(s) for s in satisfying)

    notes: tuple[str, ...] = ()
    if k == 0:
        notes = ("environment-only: no locally faulty component; the "
                 "violation is attributable to the environment",)
    report = CauseReport(
        mode=mode,
        quantifier=effective_quantifier,
        assignment=asg.to_dict(),
        candidates=tuple(universe),
        minimal_only=minimal_only,
        all_satisfying=all_satisfying,
        minimal=minimal,
        verdicts=tuple(entries),
        notes=notes,
        complexity=ComplexityNote(k, 2 ** k, len(m.components)),
    )
    stats = EnumerationStats(evaluated, pruned, monotone, tuple(rows))
    return report, stats


def enumerate_causal_sets(m: SystemModel, tr: Trace, mode: str,
                          asg: Optional[ModelAssignment] = None,
                          quantifier: str = "existential",
                          minimal_only: bool = False,
                          allow_nonfaulty: bool = False,
                          prune: bool = True) -> CauseReport:
    """Evaluate the mode predicate on every subset of the candidate
    universe (the locally faulty components, unless ``allow_nonfaulty``)
    in size-then-lexicographic order and report the satisfying sets and
    their minimal antichain."""
    report, _ = enumerate_with_stats(m, tr, mode, asg, quantifier,
                                     minimal_only, allow_nonfaulty, prune)
    return report
