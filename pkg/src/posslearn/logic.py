"""Propositional building blocks: literals, clauses, conjunctions and CNF formulas.

Textual syntax::

    literal      x, !x          (identifier [A-Za-z_][A-Za-z0-9_]*)
    clause       a | !b | c     ("false" is the empty clause)
    conjunction  a & !b         ("true" is the empty conjunction)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Sequence

from .sat import solve_int_cnf

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Assignment = Dict[str, bool]


class ParseError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Literal:
    var: str
    positive: bool = True

    def __post_init__(self):
        if not self.var:
            raise ValueError("literal variable must be nonempty")

    def __neg__(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def __str__(self):
        return self.var if self.positive else "!" + self.var

    def __repr__(self):
        return f"Literal({str(self)!r})"

    def sort_key(self):
        return (self.var, not self.positive)

    def holds(self, w: Assignment) -> bool:
        return w[self.var] == self.positive

    @classmethod
    def parse(cls, text: str) -> "Literal":
        s = text.strip()
        positive = True
        if s.startswith("!"):
            positive = False
            s = s[1:].strip()
        if not IDENT_RE.match(s) or s in ("true", "false"):
            raise ParseError(f"bad literal: {text!r}")
        return cls(s, positive)


def _sorted_lits(lits: Iterable[Literal]) -> list:
    return sorted(lits, key=Literal.sort_key)


def _has_complementary(lits: frozenset) -> bool:
    return any(Literal(l.var, not l.positive) in lits for l in lits if l.positive)


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals. The empty clause is falsum."""

    literals: frozenset = frozenset()
    tautology: bool = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.literals, frozenset):
            object.__setattr__(self, "literals", frozenset(self.literals))
        object.__setattr__(self, "tautology", _has_complementary(self.literals))

    @classmethod
    def of(cls, *lits) -> "Clause":
        return cls(frozenset(Literal.parse(l) if isinstance(l, str) else l for l in lits))

    @classmethod
    def parse(cls, text: str) -> "Clause":
        s = text.strip()
        if s == "false":
            return cls()
        if not s:
            raise ParseError("empty clause text (use 'false')")
        return cls(frozenset(Literal.parse(p) for p in s.split("|")))

    def __len__(self):
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(_sorted_lits(self.literals))

    def __contains__(self, lit):
        return lit in self.literals

    def __str__(self):
        if not self.literals:
            return "false"
        return " | ".join(str(l) for l in self)

    def __repr__(self):
        return f"Clause({str(self)!r})"

    def sort_key(self):
        return str(self)

    @property
    def vars(self) -> frozenset:
        return frozenset(l.var for l in self.literals)

    def holds(self, w: Assignment) -> bool:
        return any(l.holds(w) for l in self.literals)

    def negation(self) -> "LiteralConjunction":
        """The negation of a clause as a conjunction of complementary literals."""
        return LiteralConjunction(frozenset(-l for l in self.literals))

    def without(self, lit: Literal) -> "Clause":
        return Clause(self.literals - {lit})

    def __or__(self, other: "Clause") -> "Clause":
        return Clause(self.literals | other.literals)


@dataclass(frozen=True)
class LiteralConjunction:
    """A conjunction of literals. The empty conjunction is verum."""

    literals: frozenset = frozenset()
    consistent: bool = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.literals, frozenset):
            object.__setattr__(self, "literals", frozenset(self.literals))
        object.__setattr__(self, "consistent", not _has_complementary(self.literals))

    @classmethod
    def of(cls, *lits) -> "LiteralConjunction":
        return cls(frozenset(Literal.parse(l) if isinstance(l, str) else l for l in lits))

    @classmethod
    def parse(cls, text: str) -> "LiteralConjunction":
        s = text.strip()
        if s == "true":
            return cls()
        if not s:
            raise ParseError("empty conjunction text (use 'true')")
        return cls(frozenset(Literal.parse(p) for p in s.split("&")))

    def __len__(self):
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(_sorted_lits(self.literals))

    def __str__(self):
        if not self.literals:
            return "true"
        return " & ".join(str(l) for l in self)

    def __repr__(self):
        return f"LiteralConjunction({str(self)!r})"

    @property
    def vars(self) -> frozenset:
        return frozenset(l.var for l in self.literals)

    def holds(self, w: Assignment) -> bool:
        return all(l.holds(w) for l in self.literals)

    def negation(self) -> Clause:
        return Clause(frozenset(-l for l in self.literals))

    def as_units(self) -> list:
        return [Clause(frozenset([l])) for l in self]


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple = ()

    def __post_init__(self):
        if not isinstance(self.clauses, tuple):
            object.__setattr__(self, "clauses", tuple(self.clauses))

    @classmethod
    def parse(cls, text: str) -> "CnfFormula":
        """Clauses separated by ';' or newlines."""
        parts = [p for p in re.split(r"[;\n]", text) if p.strip()]
        return cls(tuple(Clause.parse(p) for p in parts))

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __add__(self, other) -> "CnfFormula":
        return CnfFormula(self.clauses + tuple(other))

    def __str__(self):
        return "; ".join(str(c) for c in self.clauses) if self.clauses else "true"

    @property
    def vocabulary(self) -> frozenset:
        out = set()
        for c in self.clauses:
            out.update(c.vars)
        return frozenset(out)

    def holds(self, w: Assignment) -> bool:
        return all(c.holds(w) for c in self.clauses)


def intern_clauses(clauses: Iterable[Clause], table: dict | None = None):
    """Map clauses onto dense integer literals (DIMACS style).

    Returns ``(int_clauses, table)`` where ``table`` maps variable names to
    ids starting at 1. Tautologies are dropped; they constrain nothing.
    """
    if table is None:
        table = {}
    out = []
    for c in clauses:
        if c.tautology:
            continue
        ic = []
        for l in c.literals:
            v = table.get(l.var)
            if v is None:
                v = table[l.var] = len(table) + 1
            ic.append(v if l.positive else -v)
        out.append(ic)
    return out, table


def find_model(f: Iterable[Clause]) -> Assignment | None:
    clauses = list(f)
    ints, table = intern_clauses(sorted(clauses, key=Clause.sort_key))
    model = solve_int_cnf(len(table), ints)
    if model is None:
        return None
    w = {var: model[i] for var, i in table.items()}
    for c in clauses:
        for l in c.literals:
            w.setdefault(l.var, False)
    return w


def is_satisfiable(f: Iterable[Clause]) -> bool:
    """Complete satisfiability check of a set of clauses."""
    ints, table = intern_clauses(f)
    return solve_int_cnf(len(table), ints) is not None


def entails(f: Iterable[Clause], c: Clause) -> bool:
    """Classical entailment of a clause: f plus the negated clause is unsatisfiable."""
    if c.tautology:
        return True
    return not is_satisfiable(list(f) + c.negation().as_units())


AUX_PREFIX = "$"


def at_least(k: int, lits: Sequence[Literal], tag: str | None = None) -> CnfFormula:
    """CNF whose projection onto ``lits`` holds iff at least ``k`` of them are true.

    Sequential counter: auxiliary ``s[i][j]`` may only be true when at least
    ``j`` of the first ``i`` literals are true. Auxiliary names start with
    ``$`` which the textual syntax cannot produce, so they never collide with
    user variables. Equal gadgets get equal auxiliary names.
    """
    lits = list(lits)
    n = len(lits)
    if not 0 <= k <= n:
        raise ValueError(f"at_least: k={k} out of range for {n} literals")
    if k == 0:
        return CnfFormula()
    if k == 1:
        return CnfFormula((Clause(frozenset(lits)),))
    if k == n:
        return CnfFormula(tuple(Clause(frozenset([l])) for l in lits))
    if tag is None:
        tag = "al%d[%s]" % (k, ",".join(str(l) for l in lits))

    def s(i, j):
        return Literal(f"{AUX_PREFIX}{tag}.{i}.{j}")

    clauses = []
    # s(i, j) for 1 <= i <= n, 1 <= j <= min(i, k)
    for i in range(1, n + 1):
        x = lits[i - 1]
        for j in range(1, min(i, k) + 1):
            # s(i,j) -> s(i-1,j) | x_i   (when j <= i-1), else s(i,j) -> x_i
            if j <= i - 1:
                clauses.append(Clause(frozenset([-s(i, j), s(i - 1, j), x])))
            else:
                clauses.append(Clause(frozenset([-s(i, j), x])))
            # s(i,j) -> s(i-1,j) | s(i-1,j-1)   (j >= 2)
            if j >= 2:
                if j <= i - 1:
                    clauses.append(Clause(frozenset([-s(i, j), s(i - 1, j), s(i - 1, j - 1)])))
                else:
                    clauses.append(Clause(frozenset([-s(i, j), s(i - 1, j - 1)])))
    clauses.append(Clause(frozenset([s(n, k)])))
    return CnfFormula(tuple(clauses))


def at_most(k: int, lits: Sequence[Literal]) -> CnfFormula:
    """At most k of lits true, i.e. at least n-k of their complements."""
    lits = list(lits)
    return at_least(len(lits) - k, [-l for l in lits])


def all_assignments(variables: Sequence[str]) -> Iterator[Assignment]:
    variables = list(variables)
    n = len(variables)
    for bits in range(1 << n):
        yield {v: bool((bits >> i) & 1) for i, v in enumerate(variables)}
