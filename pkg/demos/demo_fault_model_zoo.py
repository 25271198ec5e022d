#!/usr/bin/env python3
"""Tour of the five per-component fault-model languages.

A component with one output bit is observed doing 0, 1 over two steps,
while its spec demands the output stays 0.  Each fault-model kind turns
that observation into a different language of hypothetical behaviors; the
table below samples some short traces against each kind.
"""

import json

import tracecause as tc
from tracecause.counterfactual import FaultModelKind

SPEC = {
    "states": ["g"], "initial": "g", "bad": [],
    "edges": [{"from": "g", "guard": "!o", "to": "g"}],
}
DOC = {
    "variables": [{"name": "o", "owner": "C"}],
    "components": [{"name": "C", "inputs": [], "outputs": ["o"],
                    "spec": SPEC}],
    "global_spec": SPEC,
}

PROBES = ["", "0", "1", "0 1", "0 0", "0 1 1", "0 1 0"]


def to_trace(bits: str) -> tc.Trace:
    return tc.Trace(tc.Valuation({"o": int(b)}) for b in bits.split())


def main():
    m = tc.parse_system(json.dumps(DOC))
    c = m.component("C")
    observed = to_trace("0 1")
    steps = ", ".join(s.to_text() for s in observed)
    print(f"spec: o stays 0      observed: [{steps}]")
    print(f"longest correct prefix: "
          f"{tc.longest_correct_prefix(c, observed)} step(s)\n")

    models = {kind.value: tc.build_fault_model(kind, c, observed,
                                               len(observed))
              for kind in FaultModelKind}

    header = f"{'trace':10}" + "".join(f"{name:>16}" for name in models)
    print(header)
    for probe in PROBES:
        t = to_trace(probe)
        row = f"{probe or 'ε':10}"
        for aut in models.values():
            row += f"{'in' if tc.run(aut, t).accepted else '-':>16}"
        print(row)

    print("\nreading the columns:")
    print("  spec            correct behaviors only")
    print("  arbitrary       anything at all")
    print("  observed        pinned to the observation, free afterwards")
    print("  observed-out    same, but only the outputs are pinned")
    print("  prefix-correct  correct behaviors that honor the good prefix")


if __name__ == "__main__":
    main()
