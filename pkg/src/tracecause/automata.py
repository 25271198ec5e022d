"""Safety automata over Boolean variable valuations.

An automaton here is deterministic and complete, with absorbing bad
states; the accepted language (all finite traces whose run never enters a
bad state) is therefore prefix-closed, the canonical shape of a safety
property.  All operations are pure: automata are immutable after
construction and safe to share across threads (the only internal mutation
is a transition-table cache, which is idempotent).

Determinism and completeness are semantic conditions on the edge guards
and are checked by explicit enumeration of the valuations of the
automaton's variable scope (`check_wellformed`); guard variable counts
are expected to stay small.

Valuation enumeration order is fixed everywhere: variables sorted by
name, valuations in binary counting order with the lexicographically
first variable as the most significant bit.  Witness construction,
product state discovery and all reported traces inherit this order, so
identical inputs always produce identical outputs.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _cartesian
from typing import Hashable, Iterable, Optional

from .errors import DomainMismatch
from .guards import (Guard, TRUE, canonicalize, conj, guard_eval, guard_text,
                     guard_vars, is_variable_name)

State = Hashable


class Valuation(Mapping):
    """One letter of a trace: a total assignment of 0/1 to a variable set."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, assignment: Mapping[str, int]):
        items = []
        for name in sorted(assignment):
            if not is_variable_name(name):
                raise ValueError(f"illegal variable name: {name!r}")
            value = assignment[name]
            if value not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1, got {value!r}")
            items.append((name, int(value)))
        self._init(tuple(items))

    def _init(self, items: tuple[tuple[str, int], ...]):
        self._items = items
        self._map = dict(items)
        self._hash = hash(items)

    @classmethod
    def _from_items(cls, items: tuple[tuple[str, int], ...]) -> "Valuation":
        v = cls.__new__(cls)
        v._init(items)
        return v

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self._map)

    def restrict(self, names: Iterable[str]) -> "Valuation":
        try:
            return Valuation._from_items(
                tuple((n, self._map[n]) for n in sorted(names)))
        except KeyError as e:
            raise DomainMismatch(
                f"valuation over {sorted(self._map)} lacks variable {e.args[0]}"
            ) from None

    def to_text(self) -> str:
        return " ".join(f"{n}={v}" for n, v in self._items)

    def __getitem__(self, name: str) -> int:
        return self._map[name]

    def __iter__(self):
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other) -> bool:
        if isinstance(other, Valuation):
            return self._items == other._items
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Valuation({{{self.to_text()}}})"


@lru_cache(maxsize=None)
def _enumerated(names: tuple[str, ...]) -> tuple[Valuation, ...]:
    n = len(names)
    out = []
    for i in range(1 << n):
        items = tuple((names[j], (i >> (n - 1 - j)) & 1) for j in range(n))
        out.append(Valuation._from_items(tuple(sorted(items))))
    return tuple(out)


def enumerate_valuations(names: Iterable[str]) -> tuple[Valuation, ...]:
    """All valuations of ``names`` in the canonical (binary counting) order."""
    return _enumerated(tuple(sorted(names)))


class Trace(Sequence):
    """A finite sequence of valuations sharing one variable set.

    The empty trace is allowed (it belongs to every nonempty prefix-closed
    language) and has no domain of its own.
    """

    __slots__ = ("_steps",)

    def __init__(self, steps: Iterable[Valuation] = ()):
        steps = tuple(steps)
        if steps:
            dom = steps[0].domain
            for i, s in enumerate(steps):
                if s.domain != dom:
                    raise DomainMismatch(
                        f"trace step {i} has domain {sorted(s.domain)}, "
                        f"expected {sorted(dom)}")
        self._steps = steps

    @property
    def steps(self) -> tuple[Valuation, ...]:
        return self._steps

    @property
    def domain(self) -> Optional[frozenset[str]]:
        return self._steps[0].domain if self._steps else None

    def restrict(self, names: Iterable[str]) -> "Trace":
        names = tuple(sorted(names))
        return Trace(s.restrict(names) for s in self._steps)

    def to_text(self) -> str:
        return "\n".join(s.to_text() for s in self._steps)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Trace(self._steps[i])
        return self._steps[i]

    def __len__(self) -> int:
        return len(self._steps)

    def __eq__(self, other) -> bool:
        if isinstance(other, Trace):
            return self._steps == other._steps
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._steps)

    def __repr__(self) -> str:
        return f"Trace({list(self._steps)!r})"


@dataclass(frozen=True)
class RunResult:
    """Outcome of running an automaton on a trace.

    ``first_violation_index`` is the first 0-based step whose target state
    is bad; it is None exactly when the trace is accepted.
    """
    accepted: bool
    first_violation_index: Optional[int] = None


@dataclass(frozen=True)
class Diagnostic:
    """One wellformedness or validation finding; never an exception."""
    kind: str
    subject: str
    message: str
    witness: Optional[Trace] = None


@dataclass(frozen=True)
class ContainmentResult:
    """Outcome of a language containment check L(a) <= L(b).

    When containment fails, ``witness`` is a shortest trace accepted by
    ``a`` and rejected by ``b``.  ``pairs_explored`` and ``bfs_depth``
    describe the synchronized-pair search that decided the question.
    """
    holds: bool
    witness: Optional[Trace] = None
    pairs_explored: int = 0
    bfs_depth: int = 0


class SafetyAutomaton:
    """Deterministic complete automaton with absorbing bad states.

    ``edges`` maps every state to an ordered tuple of (guard, target)
    pairs.  Construction checks referential integrity and guard scope
    only; the semantic invariants (determinism, completeness, absorbing
    bad states, good initial state) are checked by `check_wellformed`,
    which reports diagnostics instead of raising so that counterexamples
    can name the offending state and rule.
    """

    __slots__ = ("vars", "states", "initial", "bad", "edges", "_tables")

    def __init__(self, vars: Iterable[str], states: Iterable[State],
                 initial: State, bad: Iterable[State],
                 edges: Mapping[State, Iterable[tuple[Guard, State]]]):
        var_tuple = tuple(sorted(set(vars)))
        for name in var_tuple:
            if not is_variable_name(name):
                raise ValueError(f"illegal variable name: {name!r}")
        state_tuple = tuple(states)
        if not state_tuple:
            raise ValueError("automaton needs at least one state")
        state_set = set(state_tuple)
        if len(state_set) != len(state_tuple):
            raise ValueError("duplicate state ids")
        if initial not in state_set:
            raise ValueError(f"initial state {initial!r} not among states")
        bad_set = frozenset(bad)
        if not bad_set <= state_set:
            raise ValueError("bad states must be a subset of states")
        normalized: dict[State, tuple[tuple[Guard, State], ...]] = {}
        scope = frozenset(var_tuple)
        for q in state_tuple:
            out = []
            for g, t in edges.get(q, ()):
                if t not in state_set:
                    raise ValueError(f"edge from {q!r} targets unknown state {t!r}")
                g = canonicalize(g)
                extra = guard_vars(g) - scope
                if extra:
                    raise ValueError(
                        f"guard on edge from {q!r} mentions undeclared "
                        f"variable {sorted(extra)[0]!r}")
                out.append((g, t))
            normalized[q] = tuple(out)
        unknown = set(edges) - state_set
        if unknown:
            raise ValueError(f"edges declared for unknown state {sorted(map(repr, unknown))[0]}")
        self.vars = var_tuple
        self.states = state_tuple
        self.initial = initial
        self.bad = bad_set
        self.edges = normalized
        self._tables: dict[tuple[str, ...], dict[State, tuple[State, ...]]] = {}

    @property
    def var_set(self) -> frozenset[str]:
        return frozenset(self.vars)

    @property
    def state_count(self) -> int:
        return len(self.states)

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.edges.values())

    def is_bad(self, q: State) -> bool:
        return q in self.bad

    def step(self, q: State, v: Mapping[str, int]) -> State:
        """Target of the unique enabled edge from ``q`` under ``v``.

        Assumes wellformedness; on an incomplete state this raises.
        """
        for g, t in self.edges[q]:
            if guard_eval(g, v):
                return t
        raise RuntimeError(f"no enabled edge from state {q!r} (automaton incomplete)")

    def transition_table(self, scope: Iterable[str]) -> dict[State, tuple[State, ...]]:
        """Per-state successor rows indexed by the canonical valuation order
        of ``scope`` (which must cover the automaton's variables).  Cached."""
        key = tuple(sorted(scope))
        tbl = self._tables.get(key)
        if tbl is None:
            if not self.var_set <= set(key):
                raise DomainMismatch(
                    f"scope {list(key)} does not cover automaton variables "
                    f"{list(self.vars)}")
            vals = enumerate_valuations(key)
            tbl = {q: tuple(self.step(q, v) for v in vals) for q in self.states}
            self._tables[key] = tbl
        return tbl

    def __eq__(self, other) -> bool:
        if isinstance(other, SafetyAutomaton):
            return (self.vars == other.vars and self.states == other.states
                    and self.initial == other.initial and self.bad == other.bad
                    and self.edges == other.edges)
        return NotImplemented

    __hash__ = None  # mutable cache inside; identity hashing would mislead

    def __repr__(self) -> str:
        return (f"SafetyAutomaton(vars={list(self.vars)}, "
                f"states={self.state_count}, bad={len(self.bad)})")


def universal_automaton(vars: Iterable[str]) -> SafetyAutomaton:
    """The automaton accepting every trace over ``vars``."""
    return SafetyAutomaton(vars, ["ok"], "ok", [], {"ok": [(TRUE, "ok")]})


def check_wellformed(a: SafetyAutomaton) -> list[Diagnostic]:
    """Check determinism, completeness, absorbing bad states and a good
    initial state; returns one diagnostic per state and violated rule.

    Determinism and completeness are decided by explicit enumeration of
    all 2^|vars| valuations at each state.
    """
    diags: list[Diagnostic] = []
    vals = enumerate_valuations(a.vars)
    for q in a.states:
        nondet_hit = None
        incomplete_hit = None
        for v in vals:
            enabled = [t for g, t in a.edges[q] if guard_eval(g, v)]
            if len(enabled) > 1 and nondet_hit is None:
                nondet_hit = v
            if not enabled and incomplete_hit is None:
                incomplete_hit = v
        if nondet_hit is not None:
            diags.append(Diagnostic(
                "nondeterministic-state", str(q),
                f"state {q!r}: several edges enabled on {nondet_hit.to_text() or 'the empty valuation'}"))
        if incomplete_hit is not None:
            diags.append(Diagnostic(
                "incomplete-state", str(q),
                f"state {q!r}: no edge enabled on {incomplete_hit.to_text() or 'the empty valuation'}"))
        if q in a.bad:
            for g, t in a.edges[q]:
                if t not in a.bad:
                    diags.append(Diagnostic(
                        "non-absorbing-bad", str(q),
                        f"bad state {q!r} has an edge to good state {t!r} "
                        f"(guard {guard_text(g)})"))
                    break
    if a.initial in a.bad:
        diags.append(Diagnostic(
            "bad-initial", str(a.initial),
            f"initial state {a.initial!r} is bad; the language would be empty"))
    return diags


def run(a: SafetyAutomaton, t: Trace) -> RunResult:
    """Simulate the unique run of ``a`` on ``t``.

    Extra trace variables are ignored (implicit cylindrification); the
    trace domain must cover the automaton's variables.
    """
    if t.domain is not None and not a.var_set <= t.domain:
        missing = sorted(a.var_set - t.domain)
        raise DomainMismatch(f"trace lacks automaton variable {missing[0]!r}")
    q = a.initial
    for i, v in enumerate(t):
        q = a.step(q, v)
        if q in a.bad:
            return RunResult(False, i)
    return RunResult(True, None)


def product(automata: Sequence[SafetyAutomaton]) -> SafetyAutomaton:
    """Synchronized product over the union variable scope.

    States are the reachable tuples of member states, a tuple being bad
    iff any coordinate is; edge guards are the canonical conjunctions of
    the coordinate guards, with unsatisfiable conjunctions pruned.  Since
    every guard mentions only its own automaton's variables, this realizes
    intersection of the inverse-projected (cylindrified) languages with no
    extra construction.
    """
    if not automata:
        raise ValueError("product of zero automata is undefined")
    scope = tuple(sorted(set().union(*(a.var_set for a in automata))))
    vals = enumerate_valuations(scope)
    nvals = len(vals)
    full_mask = (1 << nvals) - 1

    # Per automaton and state: (guard, target, bitmask of satisfying
    # valuations of the union scope).  A conjunction of member edges is
    # satisfiable iff the AND of their masks is nonzero.
    masked: list[dict[State, list[tuple[Guard, State, int]]]] = []
    for a in automata:
        per_state: dict[State, list[tuple[Guard, State, int]]] = {}
        for q in a.states:
            entries = []
            for g, t in a.edges[q]:
                mask = 0
                for i, v in enumerate(vals):
                    if guard_eval(g, v):
                        mask |= 1 << i
                entries.append((g, t, mask))
            per_state[q] = entries
        masked.append(per_state)

    init = tuple(a.initial for a in automata)
    order: list[tuple[State, ...]] = [init]
    seen = {init}
    edges: dict[State, tuple[tuple[Guard, State], ...]] = {}
    table_rows: dict[State, tuple[State, ...]] = {}
    queue = deque([init])
    while queue:
        s = queue.popleft()
        row: list[Optional[State]] = [None] * nvals
        out: list[tuple[Guard, State]] = []
        for combo in _cartesian(*(masked[i][s[i]] for i in range(len(automata)))):
            mask = full_mask
            for _, _, m in combo:
                mask &= m
                if not mask:
                    break
            if not mask:
                continue
            target = tuple(t for _, t, _ in combo)
            out.append((conj(g for g, _, _ in combo), target))
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
            for i in range(nvals):
                if (mask >> i) & 1:
                    row[i] = target
        edges[s] = tuple(out)
        table_rows[s] = tuple(row)

    bad = [s for s in order
           if any(si in a.bad for si, a in zip(s, automata))]
    result = SafetyAutomaton(scope, order, init, bad, edges)
    if all(r is not None for row in table_rows.values() for r in row):
        result._tables[scope] = table_rows  # product of complete inputs is complete
    return result


def contains(a: SafetyAutomaton, b: SafetyAutomaton) -> ContainmentResult:
    """Decide L(a) <= L(b) over the union scope by synchronized BFS.

    Searches for a shortest reachable pair (good in ``a``, bad in ``b``);
    the letters on the BFS path, taken in the canonical valuation order,
    form the witness.  Exploration from pairs whose ``a`` coordinate is
    bad is pruned: bad states are absorbing, so no witness extends them.
    """
    scope = tuple(sorted(a.var_set | b.var_set))
    vals = enumerate_valuations(scope)
    ta = a.transition_table(scope)
    tb = b.transition_table(scope)

    start = (a.initial, b.initial)
    if a.initial not in a.bad and b.initial in b.bad:
        return ContainmentResult(False, Trace(()), 1, 0)
    parents: dict[tuple[State, State], Optional[tuple[tuple[State, State], int]]] = {
        start: None}
    depth = {start: 0}
    max_depth = 0
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        qa, qb = pair
        if qa in a.bad:
            continue
        rowa, rowb = ta[qa], tb[qb]
        d = depth[pair]
        for i in range(len(vals)):
            nxt = (rowa[i], rowb[i])
            if nxt in parents:
                continue
            parents[nxt] = (pair, i)
            depth[nxt] = d + 1
            max_depth = max(max_depth, d + 1)
            if nxt[0] not in a.bad and nxt[1] in b.bad:
                letters = []
                cur = nxt
                while parents[cur] is not None:
                    prev, idx = parents[cur]
                    letters.append(vals[idx])
                    cur = prev
                letters.reverse()
                return ContainmentResult(False, Trace(letters),
                                         len(parents), d + 1)
            queue.append(nxt)
    return ContainmentResult(True, None, len(parents), max_depth)


def _layer_at(start: frozenset, step_fn, h: int) -> frozenset:
    # Layer sequence after k steps is eventually periodic; jump over the
    # cycle instead of iterating a potentially huge horizon.
    history = [start]
    seen = {start: 0}
    while len(history) <= h:
        nxt = step_fn(history[-1])
        if nxt in seen:
            j = seen[nxt]
            period = len(history) - j
            return history[j + (h - j) % period]
        seen[nxt] = len(history)
        history.append(nxt)
    return history[h]


def has_trace_of_length(a: SafetyAutomaton, h: int) -> bool:
    """True iff some trace of length exactly ``h`` is accepted, decided by
    h-step forward reachability through good states."""
    if h < 0:
        raise ValueError("length must be nonnegative")
    if a.initial in a.bad:
        return False
    table = a.transition_table(a.vars)

    def advance(layer: frozenset) -> frozenset:
        out = set()
        for q in layer:
            for t in table[q]:
                if t not in a.bad:
                    out.add(t)
        return frozenset(out)

    return bool(_layer_at(frozenset((a.initial,)), advance, h))


def find_trace_of_length(a: SafetyAutomaton, h: int) -> Optional[Trace]:
    """A deterministic accepted trace of length exactly ``h``, or None.

    Layered parent pointers are kept, so the horizon should be modest
    (it is the error-trace length in practice).
    """
    if h < 0:
        raise ValueError("length must be nonnegative")
    if a.initial in a.bad:
        return None
    if h == 0:
        return Trace(())
    vals = enumerate_valuations(a.vars)
    table = a.transition_table(a.vars)
    layers: list[dict[State, Optional[tuple[State, int]]]] = [{a.initial: None}]
    for _ in range(h):
        cur: dict[State, tuple[State, int]] = {}
        for q in layers[-1]:
            row = table[q]
            for i in range(len(vals)):
                t = row[i]
                if t not in a.bad and t not in cur:
                    cur[t] = (q, i)
        if not cur:
            return None
        layers.append(cur)
    end = next(iter(layers[h]))
    letters = []
    cur_state = end
    for k in range(h, 0, -1):
        prev, idx = layers[k][cur_state]
        letters.append(vals[idx])
        cur_state = prev
    letters.reverse()
    return Trace(letters)


def has_joint_trace_of_length(a: SafetyAutomaton, b: SafetyAutomaton,
                              h: int) -> bool:
    """True iff some trace of length exactly ``h`` is accepted by both
    automata (a good/good pair is reachable in exactly ``h`` steps)."""
    if h < 0:
        raise ValueError("length must be nonnegative")
    if a.initial in a.bad or b.initial in b.bad:
        return False
    scope = tuple(sorted(a.var_set | b.var_set))
    nvals = len(enumerate_valuations(scope))
    ta = a.transition_table(scope)
    tb = b.transition_table(scope)

    def advance(layer: frozenset) -> frozenset:
        out = set()
        for qa, qb in layer:
            rowa, rowb = ta[qa], tb[qb]
            for i in range(nvals):
                na, nb = rowa[i], rowb[i]
                if na not in a.bad and nb not in b.bad:
                    out.add((na, nb))
        return frozenset(out)

    return bool(_layer_at(frozenset(((a.initial, b.initial),)), advance, h))
