"""VC-dimension bounds for stratifications and the at-least shattering construction."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Union

from .exact import ordered_partitions
from .logic import Clause, CnfFormula, Literal, LiteralConjunction, ParseError, at_least
from .possibilistic import DefaultRule, PossTheory, poss_entails_cnf

SHATTER_MAX = 4


def vc_upper_bound(n: int, k: int) -> float:
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    return n * math.log2(k)


def vc_lower_bound(n: int, k: int) -> float:
    if k < 1 or k > n:
        raise ValueError("need 1 <= k <= n")
    return n * (math.log2(k) - 1) / 4


def vc_subset_bound(n: int, m: int, k: int) -> float:
    if not 0 <= m < n or k < 1:
        raise ValueError("need 0 <= m < n and k >= 1")
    return m * (math.log2(n) + math.log2(k))


@dataclass(frozen=True)
class AtLeast:
    """at-least_k(lits): true iff at least k of the literals are true."""

    k: int
    lits: tuple

    def __post_init__(self):
        object.__setattr__(self, "lits", tuple(self.lits))
        if not 0 <= self.k <= len(self.lits):
            raise ValueError(f"at-least threshold {self.k} out of range for {len(self.lits)} literals")

    def cnf(self) -> CnfFormula:
        return at_least(self.k, self.lits)

    def negation_cnf(self) -> CnfFormula:
        # fewer than k true  <=>  at least n-k+1 false
        n = len(self.lits)
        if self.k == 0:
            return CnfFormula((Clause(frozenset()),))
        return at_least(n - self.k + 1, [-l for l in self.lits])

    def __str__(self):
        return "atleast(%d; %s)" % (self.k, ", ".join(str(l) for l in self.lits))

    _RE = re.compile(r"^\s*atleast\(\s*(\d+)\s*;([^)]*)\)\s*$")

    @classmethod
    def parse(cls, text: str) -> "AtLeast":
        m = cls._RE.match(text)
        if not m:
            raise ParseError(f"bad at-least expression: {text!r}")
        lits = [Literal.parse(p) for p in m.group(2).split(",") if p.strip()]
        return cls(int(m.group(1)), tuple(lits))


@dataclass(frozen=True)
class GadgetRule:
    antecedent: AtLeast
    consequent: AtLeast

    def __str__(self):
        return f"{self.antecedent} ~> {self.consequent}"

    @classmethod
    def parse(cls, text: str) -> "GadgetRule":
        if text.count("~>") != 1:
            raise ParseError(f"expected exactly one '~>' in {text!r}")
        a, b = text.split("~>")
        return cls(AtLeast.parse(a), AtLeast.parse(b))

    def as_default_rule(self) -> DefaultRule:
        """The equivalent literal-form rule, when the gadgets degenerate to one.

        That is the case when the antecedent needs all its literals and the
        consequent at least one.
        """
        a, b = self.antecedent, self.consequent
        if a.k != len(a.lits) or b.k != 1:
            raise ValueError(f"{self} has no literal-conjunction form")
        return DefaultRule(LiteralConjunction(frozenset(a.lits)), Clause(frozenset(b.lits)))


AnyRule = Union[DefaultRule, GadgetRule]


def _query_parts(r: AnyRule):
    if isinstance(r, GadgetRule):
        return r.antecedent.cnf(), r.consequent.negation_cnf()
    return CnfFormula(tuple(r.antecedent.as_units())), CnfFormula(tuple(r.consequent.negation().as_units()))


def covers_rule(t: PossTheory, r: AnyRule) -> bool:
    ev, neg = _query_parts(r)
    return poss_entails_cnf(t, ev, neg)


@dataclass(frozen=True)
class ShatterInstance:
    theory: frozenset  # of Clause
    defaults: tuple  # of DefaultRule | GadgetRule


def _var(i: int) -> str:
    return f"x{i}"


def build_shatter_instance(n: int) -> ShatterInstance:
    """Theory {x1..xn} and one rule per block inequality kth(L, r) < kth(R, r).

    Blocks of size b = 1, 2, 4, ..., n/2 are paired left/right inside each
    aligned group of 2b variables; for r = 1..b the rule is
    at-least_{b-r+1}(!L) ~> at-least_r(R).
    """
    if n not in (2, 4, 8):
        raise ValueError(f"n must be 2, 4 or 8, got {n}")
    xs = [Literal(_var(i)) for i in range(1, n + 1)]
    rules: List[AnyRule] = []
    b = 1
    while b < n:
        for start in range(0, n, 2 * b):
            left, right = xs[start:start + b], xs[start + b:start + 2 * b]
            for r in range(1, b + 1):
                rules.append(GadgetRule(AtLeast(b - r + 1, tuple(-l for l in left)),
                                        AtLeast(r, tuple(right))))
        b *= 2
    theory = frozenset(Clause(frozenset([x])) for x in xs)
    return ShatterInstance(theory, tuple(rules))


def realized_labelings(inst: ShatterInstance) -> set:
    """Bitmasks (bit i = rule i covered) realized by some ordered partition."""
    if len(inst.theory) > SHATTER_MAX:
        raise ValueError(f"shattering check limited to theories of {SHATTER_MAX} formulas")
    seen = set()
    items = sorted(inst.theory, key=Clause.sort_key)
    for part in ordered_partitions(items):
        t = PossTheory(tuple(frozenset(b) for b in part))
        mask = 0
        for i, r in enumerate(inst.defaults):
            if covers_rule(t, r):
                mask |= 1 << i
        seen.add(mask)
    return seen


def is_shattered(inst: ShatterInstance) -> bool:
    return len(realized_labelings(inst)) == 1 << len(inst.defaults)
