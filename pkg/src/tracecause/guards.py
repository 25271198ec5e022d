"""Propositional guard formulas over Boolean system variables.

Guards label safety-automaton edges; a guard denotes the set of valuations
it is true on, and automaton determinism/completeness are phrased in terms
of that denotation.  Guards are normalized to a canonical negation normal
form (negations pushed to variables, n-ary conjunctions/disjunctions
flattened, operands deduplicated and sorted by variable name) so that
printing is byte-reproducible and structural equality is meaningful.

Satisfiability and validity are decided by explicit enumeration of the
valuations of the mentioned variables; variable counts are expected to be
small, so no solver is involved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ParseError, UndeclaredVariable

VAR_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

_KEYWORDS = frozenset({"true", "false"})


def is_variable_name(name: str) -> bool:
    """True for a legal variable identifier (keywords excluded)."""
    return bool(VAR_NAME_RE.match(name)) and name not in _KEYWORDS


@dataclass(frozen=True)
class Guard:
    """Base class for guard AST nodes."""


@dataclass(frozen=True)
class Const(Guard):
    value: bool


@dataclass(frozen=True)
class Var(Guard):
    name: str


@dataclass(frozen=True)
class Not(Guard):
    operand: Guard


@dataclass(frozen=True)
class And(Guard):
    operands: tuple[Guard, ...]


@dataclass(frozen=True)
class Or(Guard):
    operands: tuple[Guard, ...]


TRUE = Const(True)
FALSE = Const(False)


def guard_eval(g: Guard, valuation: Mapping[str, int]) -> bool:
    """Evaluate ``g`` on a valuation (any mapping from variable name to 0/1)."""
    if isinstance(g, Const):
        return g.value
    if isinstance(g, Var):
        try:
            return bool(valuation[g.name])
        except KeyError:
            raise UndeclaredVariable(g.name) from None
    if isinstance(g, Not):
        return not guard_eval(g.operand, valuation)
    if isinstance(g, And):
        return all(guard_eval(c, valuation) for c in g.operands)
    if isinstance(g, Or):
        return any(guard_eval(c, valuation) for c in g.operands)
    raise TypeError(f"not a guard: {g!r}")


def guard_vars(g: Guard) -> frozenset[str]:
    """The set of variables mentioned by ``g``."""
    if isinstance(g, Const):
        return frozenset()
    if isinstance(g, Var):
        return frozenset((g.name,))
    if isinstance(g, Not):
        return guard_vars(g.operand)
    if isinstance(g, (And, Or)):
        out: frozenset[str] = frozenset()
        for c in g.operands:
            out |= guard_vars(c)
        return out
    raise TypeError(f"not a guard: {g!r}")


def _key(g: Guard):
    # Total order on canonical nodes; kind rank first so comparisons never
    # reach payloads of different shapes.
    if isinstance(g, Var):
        return (0, g.name, 0)
    if isinstance(g, Not):
        return (0, g.operand.name, 1)  # canonical Not wraps a Var
    if isinstance(g, And):
        return (1, tuple(_key(c) for c in g.operands))
    if isinstance(g, Or):
        return (2, tuple(_key(c) for c in g.operands))
    return (3, bool(g.value))


def _assemble(is_and: bool, parts: Iterable[Guard]) -> Guard:
    absorbing = FALSE if is_and else TRUE
    neutral = TRUE if is_and else FALSE
    flat: list[Guard] = []
    for p in parts:
        if isinstance(p, And if is_and else Or):
            flat.extend(p.operands)
        elif p == absorbing:
            return absorbing
        elif p != neutral:
            flat.append(p)
    seen = set()
    unique = []
    for p in flat:
        k = _key(p)
        if k not in seen:
            seen.add(k)
            unique.append(p)
    unique.sort(key=_key)
    if not unique:
        return neutral
    if len(unique) == 1:
        return unique[0]
    return And(tuple(unique)) if is_and else Or(tuple(unique))


def _canon(g: Guard, negated: bool) -> Guard:
    if isinstance(g, Const):
        return Const(g.value != negated)
    if isinstance(g, Var):
        return Not(g) if negated else g
    if isinstance(g, Not):
        return _canon(g.operand, not negated)
    if isinstance(g, And):
        return _assemble(not negated, (_canon(c, negated) for c in g.operands))
    if isinstance(g, Or):
        return _assemble(negated, (_canon(c, negated) for c in g.operands))
    raise TypeError(f"not a guard: {g!r}")


def canonicalize(g: Guard) -> Guard:
    """Canonical NNF of ``g``: flat, sorted, deduplicated, constants folded."""
    return _canon(g, False)


def negate(g: Guard) -> Guard:
    return _canon(g, True)


def conj(parts: Iterable[Guard]) -> Guard:
    """Canonical conjunction of already-canonical guards."""
    return _assemble(True, parts)


def disj(parts: Iterable[Guard]) -> Guard:
    """Canonical disjunction of already-canonical guards."""
    return _assemble(False, parts)


def cube(valuation: Mapping[str, int], names: Iterable[str]) -> Guard:
    """The conjunction of literals pinning ``names`` to their values in
    ``valuation``; TRUE when ``names`` is empty."""
    lits: list[Guard] = []
    for n in sorted(names):
        lits.append(Var(n) if valuation[n] else Not(Var(n)))
    return conj(lits)


def satisfiable(g: Guard) -> bool:
    """Decide satisfiability by enumerating valuations of mentioned variables."""
    names = sorted(guard_vars(g))
    n = len(names)
    for i in range(1 << n):
        v = {names[j]: (i >> (n - 1 - j)) & 1 for j in range(n)}
        if guard_eval(g, v):
            return True
    return False


def guard_text(g: Guard) -> str:
    """Canonical concrete syntax; ``parse_guard(guard_text(g)) == g`` for
    canonical ``g``."""
    if isinstance(g, Const):
        return "true" if g.value else "false"
    if isinstance(g, Var):
        return g.name
    if isinstance(g, Not):
        inner = guard_text(g.operand)
        if isinstance(g.operand, Var):
            return f"!{inner}"
        return f"!({inner})"
    if isinstance(g, And):
        parts = []
        for c in g.operands:
            t = guard_text(c)
            parts.append(f"({t})" if isinstance(c, Or) else t)
        return " & ".join(parts)
    if isinstance(g, Or):
        return " | ".join(guard_text(c) for c in g.operands)
    raise TypeError(f"not a guard: {g!r}")


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[!&|()]")


def _tokenize(text: str, context: str | None):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} in guard",
                             line=1, column=pos + 1, context=context)
        tokens.append((m.group(0), pos + 1))
        pos = m.end()
    return tokens


class _GuardParser:
    def __init__(self, tokens, length: int, context: str | None):
        self.tokens = tokens
        self.pos = 0
        self.length = length
        self.context = context

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str):
        column = (self.tokens[self.pos][1] if self.pos < len(self.tokens)
                  else self.length + 1)
        raise ParseError(message, line=1, column=column, context=self.context)

    def parse_or(self) -> Guard:
        parts = [self.parse_and()]
        while self.peek() == "|":
            self.take()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Guard:
        parts = [self.parse_atom()]
        while self.peek() == "&":
            self.take()
            parts.append(self.parse_atom())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_atom(self) -> Guard:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of guard")
        if tok == "!":
            self.take()
            return Not(self.parse_atom())
        if tok == "(":
            self.take()
            inner = self.parse_or()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return inner
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if VAR_NAME_RE.match(tok):
            self.take()
            return Var(tok)
        self.fail(f"expected a guard atom, found {tok!r}")
        raise AssertionError  # fail() always raises


def parse_guard(text: str, context: str | None = None) -> Guard:
    """Parse ``true | false | ident | !g | g & g | g '|' g`` with ``&``
    binding tighter than ``|``; returns the canonicalized AST."""
    parser = _GuardParser(_tokenize(text, context), len(text), context)
    g = parser.parse_or()
    if parser.peek() is not None:
        parser.fail(f"trailing input after guard: {parser.peek()!r}")
    return canonicalize(g)
