"""Sanity checks for the test-side oracles themselves.

The residual-based oracle decides unbounded containment; the literal
oracle enumerates traces up to a bound.  Wherever both speak, they must
agree in the logically forced directions: a bounded witness refutes
unbounded containment, and unbounded containment implies every bounded
check passes.
"""

from __future__ import annotations

import random

from tracecause.counterfactual import FaultModelKind, ModelAssignment

from oracle import (KindLang, all_traces, literal_mitigates, member_kind,
                    operand_langs, oracle_contained, oracle_mitigates,
                    restrict, trace_to_letters, DEAD)
from randsys import random_components, random_error_trace, random_system, random_trace


def test_kindlang_residuals_match_whole_word_membership():
    rng = random.Random(91)
    for _ in range(60):
        comps = random_components(rng, max_components=2)
        c = rng.choice(comps)
        names = sorted(c.vars)
        obs_trace = random_trace(rng, c.vars, rng.randint(0, 3))
        obs = [restrict(dict(s.items()), names) for s in obs_trace]
        for kind in FaultModelKind:
            lang = KindLang(kind, c, obs)
            for w in all_traces(names, len(obs) + 2):
                state = lang.initial()
                alive = True
                for letter in w:
                    state = lang.advance(state, letter)
                    if state is DEAD:
                        alive = False
                        break
                assert alive == member_kind(kind, c, w, obs)


def test_residual_containment_consistent_with_literal_enumeration():
    rng = random.Random(92)
    compared = 0
    for _ in range(150):
        m = random_system(rng, max_components=2, max_good=2)
        tr = random_error_trace(rng, m, max_len=2, tries=20)
        if tr is None:
            continue
        asg = ModelAssignment.defaults(m)
        names = [c.name for c in m.components]
        d = frozenset(n for n in names if rng.random() < 0.5)
        unbounded = oracle_mitigates(m, tr, d, asg)
        bounded = literal_mitigates(m, tr, d, asg, bound=len(tr) + 3)
        compared += 1
        if not bounded:            # a short witness exists
            assert not unbounded
        if unbounded:              # containment at all lengths
            assert bounded
    assert compared > 80


def test_residual_containment_terminates_on_arbitrary_kinds():
    rng = random.Random(93)
    m = random_system(rng, max_components=3)
    tr = random_error_trace(rng, m)
    if tr is None:
        return
    asg = ModelAssignment.defaults(m, cf_kind=FaultModelKind.ARBITRARY,
                                   fault_kind=FaultModelKind.ARBITRARY)
    langs = operand_langs(m, trace_to_letters(tr), frozenset(), asg,
                          "mitigation")
    # all-arbitrary operand is universal: contained only if theta is
    oracle_contained(langs, m.global_spec, sorted(m.variables))
