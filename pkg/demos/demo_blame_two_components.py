#!/usr/bin/env python3
"""Walkthrough: who is to blame when two components misbehave at once?

Two components: A drives x and promises it stays 0; B reads x, drives y
and promises y stays 0.  The system-level requirement only cares about y.
On the observed step both x and y are 1, so both components are locally
faulty - but they are not equally liable for the system failure.
"""

from pathlib import Path

import tracecause as tc

DATA = Path(__file__).parent / "data"


def main():
    m = tc.parse_system((DATA / "system.json").read_text())
    tr = tc.parse_trace((DATA / "trace.txt").read_text(), m.variables)

    print("refinement check:", tc.validate_system(m) or "holds")
    report = tc.faulty_components(m, tr)
    print(f"global spec violated at step {report.global_violation_index}")
    for name, index in report.faulty:
        print(f"  {name} breaks its own spec at step {index}")

    print("\nmitigation: would correcting this set save the system?")
    for members in ([], ["A"], ["B"], ["A", "B"]):
        v = tc.mitigates(m, tr, members)
        label = "{" + ",".join(members) + "}"
        extra = ""
        if v.witness is not None:
            extra = f"  (counterexample: {v.witness.to_text()})"
        print(f"  {label:6} -> {v.holds}{extra}")

    print("\nmanifestation: is this set's observed behavior enough to fail")
    print("the system even if everyone else behaved?")
    for members in ([], ["A"], ["B"], ["A", "B"]):
        v = tc.manifests(m, tr, members, quantifier="universal")
        label = "{" + ",".join(members) + "}"
        print(f"  {label:6} -> {v.holds}")

    print("\nminimal causal sets:")
    for mode in ("mitigation", "manifestation"):
        rep = tc.enumerate_causal_sets(m, tr, mode, quantifier="universal")
        print(f"  {mode:14} -> {[str(s) for s in rep.minimal]}")
    print("\nonly B can both save the run and sink it: A's fault never"
          "\nreaches the requirement, which watches y alone.")


if __name__ == "__main__":
    main()
