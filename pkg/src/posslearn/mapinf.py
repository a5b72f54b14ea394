"""Brute-force MAP entailment over weighted clause theories and dataset generation.

A world's score is the sum of weights of the clauses it satisfies; the MAP
models of evidence a are its maximum-score models, and a MAP-entails b iff b
holds in all of them.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import List

import numpy as np

from .logic import Assignment, Clause, Literal, LiteralConjunction, ParseError
from .possibilistic import DefaultRule, LabeledExample

MAX_VARS = 20
REL_TOL = 1e-9


@dataclass(frozen=True)
class WeightedClauseTheory:
    items: tuple  # of (Clause, float)
    vocabulary: tuple = ()

    def __post_init__(self):
        items = tuple((c, float(w)) for c, w in self.items)
        for _, w in items:
            if not math.isfinite(w):
                raise ValueError(f"non-finite weight {w}")
        vocab = set(self.vocabulary)
        for c, _ in items:
            vocab |= c.vars
        if len(vocab) > MAX_VARS:
            raise ValueError(f"vocabulary of {len(vocab)} variables exceeds brute-force limit {MAX_VARS}")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "vocabulary", tuple(sorted(vocab)))

    def scaled(self, factor: float) -> "WeightedClauseTheory":
        return WeightedClauseTheory(tuple((c, w * factor) for c, w in self.items), self.vocabulary)

    def to_text(self) -> str:
        return "".join(f"{w!r}\t{c}\n" for c, w in self.items)

    @classmethod
    def from_text(cls, text: str) -> "WeightedClauseTheory":
        items = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = raw.split("\t")
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected '<weight>\\t<clause>'")
            try:
                w = float(parts[0])
                c = Clause.parse(parts[1])
            except (ValueError, ParseError) as e:
                raise ParseError(f"line {lineno}: {e}") from None
            items.append((c, w))
        return cls(tuple(items))


@dataclass(frozen=True)
class MapQuery:
    evidence: LiteralConjunction
    conclusion: Literal

    def __post_init__(self):
        vs = [l.var for l in self.evidence.literals]
        if len(vs) != len(set(vs)):
            raise ValueError("evidence variables must be distinct")


def score(m: WeightedClauseTheory, w: Assignment) -> float:
    missing = set(m.vocabulary) - set(w)
    if missing:
        raise ValueError(f"assignment misses variables {sorted(missing)}")
    return sum(wt for c, wt in m.items if c.holds(w))


class _WorldTable:
    """Scores of all 2^n worlds; bit i of a world index is vocabulary[i]."""

    def __init__(self, m: WeightedClauseTheory):
        self.vars = m.vocabulary
        self.index = {v: i for i, v in enumerate(self.vars)}
        n = len(self.vars)
        worlds = np.arange(1 << n, dtype=np.int64)
        self.bits = ((worlds[:, None] >> np.arange(n)) & 1).astype(bool)
        self.scores = np.zeros(1 << n)
        for c, wt in m.items:
            sat = np.zeros(1 << n, dtype=bool)
            for l in c.literals:
                col = self.bits[:, self.index[l.var]]
                sat |= col if l.positive else ~col
            self.scores += wt * sat

    def evidence_mask(self, evidence: LiteralConjunction) -> np.ndarray:
        mask = np.ones(len(self.scores), dtype=bool)
        for l in evidence.literals:
            col = self.bits[:, self.index[l.var]]
            mask &= col if l.positive else ~col
        return mask

    def map_indices(self, evidence: LiteralConjunction) -> np.ndarray:
        mask = self.evidence_mask(evidence)
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            return idx
        s = self.scores[idx]
        best = s.max()
        tol = REL_TOL * max(1.0, abs(best))
        return idx[s >= best - tol]

    def assignment(self, i: int) -> Assignment:
        return {v: bool(self.bits[i, j]) for j, v in enumerate(self.vars)}


@lru_cache(maxsize=32)
def _table(m: WeightedClauseTheory) -> _WorldTable:
    return _WorldTable(m)


def _check_vocab(m: WeightedClauseTheory, vars_):
    extra = set(vars_) - set(m.vocabulary)
    if extra:
        raise ValueError(f"variables {sorted(extra)} not in the theory's vocabulary")


def map_models(m: WeightedClauseTheory, evidence: LiteralConjunction) -> List[Assignment]:
    """All maximum-score assignments satisfying the evidence, in world-index order."""
    _check_vocab(m, evidence.vars)
    tab = _table(m)
    return [tab.assignment(int(i)) for i in tab.map_indices(evidence)]


def map_entails(m: WeightedClauseTheory, q: MapQuery) -> bool:
    _check_vocab(m, q.evidence.vars | {q.conclusion.var})
    tab = _table(m)
    idx = tab.map_indices(q.evidence)
    col = tab.bits[idx, tab.index[q.conclusion.var]]
    return bool(np.all(col == q.conclusion.positive))


def generate_dataset(m: WeightedClauseTheory, k: int, n: int, rng: random.Random) -> List[LabeledExample]:
    """n labelled rules: evidence of 1..k literals on distinct variables, one-literal conclusion."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    vocab = list(m.vocabulary)
    if k >= len(vocab):
        raise ValueError(f"k={k} leaves no conclusion variable among {len(vocab)}")
    out = []
    for _ in range(n):
        size = rng.randint(1, k)
        ev_vars = rng.sample(vocab, size)
        ev = LiteralConjunction(frozenset(Literal(v, rng.random() < 0.5) for v in ev_vars))
        rest = [v for v in vocab if v not in ev_vars]
        concl = Literal(rng.choice(rest), rng.random() < 0.5)
        label = 1 if map_entails(m, MapQuery(ev, concl)) else -1
        out.append(LabeledExample(DefaultRule(ev, Clause(frozenset([concl]))), label))
    return out


def random_weighted_theory(n_vars: int, n_clauses: int, rng: random.Random,
                           max_len: int = 3, weight_range=(-2.0, 2.0)) -> WeightedClauseTheory:
    vocab = [f"v{i}" for i in range(n_vars)]
    items = []
    for _ in range(n_clauses):
        size = rng.randint(1, min(max_len, n_vars))
        lits = frozenset(Literal(v, rng.random() < 0.5) for v in rng.sample(vocab, size))
        items.append((Clause(lits), rng.uniform(*weight_range)))
    return WeightedClauseTheory(tuple(items), tuple(vocab))
