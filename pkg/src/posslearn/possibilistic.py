"""Stratified possibilistic theories and inconsistency-tolerant entailment.

A theory is a list of strata of clauses, lowest certainty first, plus an
optional hard stratum that sits above every stratum and above query
evidence. Weights are ordinal; stratum ``i`` of ``k`` is presented as
``i/k`` only when written to a file.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from .logic import (
    Clause,
    CnfFormula,
    Literal,
    LiteralConjunction,
    ParseError,
    entails,
    is_satisfiable,
)


@dataclass(frozen=True)
class DefaultRule:
    antecedent: LiteralConjunction
    consequent: Clause

    @classmethod
    def parse(cls, text: str) -> "DefaultRule":
        if "~>" not in text:
            raise ParseError(f"missing '~>' in rule: {text!r}")
        lhs, rhs = text.split("~>", 1)
        cons = Clause.parse(rhs)
        if not cons.literals:
            raise ParseError(f"empty consequent in rule: {text!r}")
        return cls(LiteralConjunction.parse(lhs), cons)

    def __str__(self):
        return f"{self.antecedent} ~> {self.consequent}"

    @property
    def vars(self) -> frozenset:
        return self.antecedent.vars | self.consequent.vars

    def material_clause(self) -> Clause:
        """The clause !a1 | ... | !an | b1 | ... | bm."""
        return self.antecedent.negation() | self.consequent


@dataclass(frozen=True)
class LabeledExample:
    rule: DefaultRule
    label: int
    group: Optional[str] = None

    def __post_init__(self):
        if self.label not in (1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")


def _freeze_stratum(s) -> frozenset:
    return s if isinstance(s, frozenset) else frozenset(s)


@dataclass(frozen=True)
class PossTheory:
    strata: tuple = ()
    hard: frozenset = frozenset()

    def __post_init__(self):
        strata = tuple(_freeze_stratum(s) for s in self.strata)
        object.__setattr__(self, "strata", strata)
        object.__setattr__(self, "hard", _freeze_stratum(self.hard))
        seen = set()
        for s in strata:
            if not s:
                raise ValueError("empty stratum")
            for c in s:
                if c in seen:
                    raise ValueError(f"clause {c} appears in more than one stratum")
                seen.add(c)

    @classmethod
    def of(cls, *strata, hard=()) -> "PossTheory":
        """Build from clause texts: ``PossTheory.of(["flies"], ["!penguin | !flies"])``."""
        def conv(c):
            return Clause.parse(c) if isinstance(c, str) else c
        return cls(tuple(frozenset(conv(c) for c in s) for s in strata),
                   frozenset(conv(c) for c in hard))

    @property
    def k(self) -> int:
        return len(self.strata)

    def clauses(self) -> List[Clause]:
        """All stratified clauses, lowest stratum first, lexicographic within."""
        return [c for s in self.strata for c in sorted(s, key=Clause.sort_key)]

    def __contains__(self, c: Clause) -> bool:
        return any(c in s for s in self.strata)

    def stratum_of(self, c: Clause) -> int:
        for i, s in enumerate(self.strata):
            if c in s:
                return i
        raise KeyError(c)

    def weights(self) -> List[Fraction]:
        k = self.k
        return [Fraction(i, k) for i in range(1, k + 1)]

    @property
    def vocabulary(self) -> frozenset:
        out = set()
        for s in self.strata:
            for c in s:
                out |= c.vars
        for c in self.hard:
            out |= c.vars
        return frozenset(out)

    def canonical_key(self) -> tuple:
        return (tuple(tuple(sorted(c.sort_key() for c in s)) for s in self.strata),
                tuple(sorted(c.sort_key() for c in self.hard)))

    # --- editing (all return new theories) -------------------------------

    def add_to_stratum(self, i: int, c: Clause) -> "PossTheory":
        strata = list(self.strata)
        strata[i] = strata[i] | {c}
        return PossTheory(tuple(strata), self.hard)

    def insert_stratum(self, p: int, clauses: Iterable[Clause]) -> "PossTheory":
        strata = list(self.strata)
        strata.insert(p, frozenset(clauses))
        return PossTheory(tuple(strata), self.hard)

    def remove(self, c: Clause) -> "PossTheory":
        """Drop a clause; a stratum left empty disappears."""
        strata = [s - {c} for s in self.strata]
        return PossTheory(tuple(s for s in strata if s), self.hard)

    def replace(self, old: Clause, new: Clause) -> "PossTheory":
        i = self.stratum_of(old)
        strata = list(self.strata)
        strata[i] = (strata[i] - {old}) | {new}
        return PossTheory(tuple(strata), self.hard)

    def with_hard(self, hard: Iterable[Clause]) -> "PossTheory":
        return PossTheory(self.strata, frozenset(hard))

    # --- text format -----------------------------------------------------

    def to_text(self) -> str:
        lines = []
        k = self.k
        for i, s in enumerate(self.strata, start=1):
            w = format_weight(Fraction(i, k))
            for c in sorted(s, key=Clause.sort_key):
                lines.append(f"{w}\t{c}")
        for c in sorted(self.hard, key=Clause.sort_key):
            lines.append(f"HARD\t{c}")
        return "".join(l + "\n" for l in lines)

    @classmethod
    def from_text(cls, text: str) -> "PossTheory":
        by_weight: dict = {}
        hard = set()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = raw.split("\t")
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected '<weight>\\t<clause>'")
            w, ctext = parts[0].strip(), parts[1]
            try:
                c = Clause.parse(ctext)
            except ParseError as e:
                raise ParseError(f"line {lineno}: {e}") from None
            if w == "HARD":
                hard.add(c)
                continue
            try:
                wf = Fraction(w)
            except ValueError:
                raise ParseError(f"line {lineno}: bad weight {w!r}") from None
            if not 0 < wf <= 1:
                raise ParseError(f"line {lineno}: weight {w} outside (0,1]")
            by_weight.setdefault(wf, set()).add(c)
        strata = []
        seen = set()
        # a clause listed at several weights keeps only its highest one
        for w in sorted(by_weight, reverse=True):
            s = frozenset(by_weight[w] - seen)
            seen |= s
            if s:
                strata.append(s)
        strata.reverse()
        return cls(tuple(strata), frozenset(hard))

    def __str__(self):
        parts = ["{" + ", ".join(str(c) for c in sorted(s, key=Clause.sort_key)) + "}"
                 for s in self.strata]
        out = "[" + ", ".join(parts) + "]"
        if self.hard:
            out += " HARD {" + ", ".join(str(c) for c in sorted(self.hard, key=Clause.sort_key)) + "}"
        return out


def format_weight(w: Fraction) -> str:
    return "%.10g" % float(w)


# --- cuts and inconsistency level ---------------------------------------------


def strict_cut(t: PossTheory, j: int) -> CnfFormula:
    """Clauses of strata above index ``j`` (1-based strata), plus the hard stratum."""
    if not 0 <= j <= t.k:
        raise IndexError(f"cut index {j} outside [0, {t.k}]")
    out = []
    for s in t.strata[j:]:
        out.extend(sorted(s, key=Clause.sort_key))
    out.extend(sorted(t.hard, key=Clause.sort_key))
    return CnfFormula(tuple(out))


@dataclass
class LevelInfo:
    level: int
    sat_calls: int
    hard_inconsistent: bool = False


def sat_call_budget(k: int) -> int:
    return math.ceil(math.log2(k + 1)) + 1


def _level_search(levels: Sequence[Sequence[Clause]], hard: Sequence[Clause]) -> LevelInfo:
    """Smallest j with levels[j:] + hard satisfiable, by binary search.

    ``levels[j:]`` shrinks as ``j`` grows, so satisfiability is monotone in
    ``j``. The search assumes the top (hard only) is satisfiable and checks it
    at most once, at the end: ceil(log2(k+1)) + 1 calls in total.
    """
    k = len(levels)
    calls = 0

    def sat(j):
        nonlocal calls
        calls += 1
        cut = [c for lvl in levels[j:] for c in lvl]
        cut.extend(hard)
        return is_satisfiable(cut)

    lo, hi = 0, k
    while lo < hi:
        mid = (lo + hi) // 2
        if sat(mid):
            hi = mid
        else:
            lo = mid + 1
    if lo == k and hard and not sat(k):
        return LevelInfo(k, calls, hard_inconsistent=True)
    return LevelInfo(lo, calls)


def inconsistency_info(t: PossTheory) -> LevelInfo:
    return _level_search(t.strata, list(t.hard))


def inconsistency_level(t: PossTheory) -> int:
    """Index j of the lowest satisfiable strict cut (0 when t is consistent).

    When the hard stratum itself is unsatisfiable, returns k; see
    :func:`inconsistency_info` for the flag.
    """
    return inconsistency_info(t).level


def _query_levels(t: PossTheory, evidence_units: Sequence[Clause]) -> list:
    levels = [list(s) for s in t.strata]
    if evidence_units:
        levels.append(list(evidence_units))
    return levels


def naive_poss_entails(t: PossTheory, evidence: LiteralConjunction, goal: Clause,
                       info: Optional[list] = None) -> bool:
    """Reference path: evidence as a new top stratum, binary-searched cut, entailment."""
    levels = _query_levels(t, evidence.as_units())
    li = _level_search(levels, list(t.hard))
    if info is not None:
        info.append((len(levels), li))
    cut = [c for lvl in levels[li.level:] for c in lvl] + list(t.hard)
    return entails(cut, goal)


def poss_entails_cnf(t: PossTheory, evidence: CnfFormula, goal_negation: CnfFormula) -> bool:
    """Generalized covering with CNF evidence and a CNF-encoded negated goal.

    The goal is entailed iff the cut at the inconsistency level together with
    ``goal_negation`` is unsatisfiable. Used for gadget rules whose antecedent
    and consequent are not literal conjunctions / clauses.
    """
    levels = _query_levels(t, list(evidence))
    li = _level_search(levels, list(t.hard))
    cut = [c for lvl in levels[li.level:] for c in lvl] + list(t.hard)
    return not is_satisfiable(cut + list(goal_negation))


# --- query cache ----------------------------------------------------------------


class QueryCache:
    """Thread-safe bounded LRU keyed by (canonical theory, evidence, goal)."""

    def __init__(self, maxsize: int = 200_000):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key):
        with self._lock:
            try:
                v = self._data[key]
            except KeyError:
                self.misses += 1
                return None
            self._data.move_to_end(key)
            self.hits += 1
            return v

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0

    def __len__(self):
        return len(self._data)


DEFAULT_CACHE = QueryCache()


def poss_entails(t: PossTheory, evidence: LiteralConjunction, goal: Clause, *,
                 method: str = "auto", cache: Optional[QueryCache] = DEFAULT_CACHE) -> bool:
    """(t, evidence) |-poss goal.

    ``method`` is one of ``naive``, ``pruned``, ``worlds`` or ``auto``; all
    give the same answer (see :mod:`posslearn.accel`).
    """
    key = None
    if cache is not None:
        key = (t.canonical_key(), evidence.literals, goal.literals)
        hit = cache.get(key)
        if hit is not None:
            return hit
    if method == "naive":
        ans = naive_poss_entails(t, evidence, goal)
    else:
        from .accel import entails_with
        ans = entails_with(method, t, evidence, goal)
    if cache is not None:
        cache.put(key, ans)
    return ans


def covers(t: PossTheory, e: DefaultRule, **kw) -> int:
    return 1 if poss_entails(t, e.antecedent, e.consequent, **kw) else -1


# --- evaluation -------------------------------------------------------------------


@dataclass
class EvalReport:
    n: int
    errors: int
    per_example: list = field(default_factory=list)

    @property
    def sample_error(self) -> Fraction:
        return Fraction(self.errors, self.n)

    @property
    def accuracy(self) -> Fraction:
        return 1 - self.sample_error

    def _count(self, label, pred):
        return sum(1 for e, p in self.per_example if e.label == label and p == pred)

    @property
    def confusion(self) -> dict:
        return {"tp": self._count(1, 1), "fn": self._count(1, -1),
                "fp": self._count(-1, 1), "tn": self._count(-1, -1)}

    def to_tsv(self) -> str:
        return ("n\terrors\tsample_error\taccuracy\n"
                f"{self.n}\t{self.errors}\t{float(self.sample_error):.6g}\t{float(self.accuracy):.6g}\n")


def evaluate(t: PossTheory, data: Sequence[LabeledExample], **kw) -> EvalReport:
    if not data:
        raise ValueError("evaluate: empty dataset")
    method = kw.pop("method", "auto")
    if method in ("auto", "worlds", "pruned") and not kw:
        from .accel import Evaluator
        preds = Evaluator(data, method=method).predict(t)
    else:
        preds = [covers(t, e.rule, method=method, **kw) for e in data]
    per = list(zip(data, preds))
    errors = sum(1 for e, p in per if p != e.label)
    return EvalReport(len(data), errors, per)
