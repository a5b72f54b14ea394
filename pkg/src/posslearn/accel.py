"""Faster routes to the same possibilistic entailment answers.

``worlds``
    Every clause becomes a bitset over all 2^n worlds of a small vocabulary
    (Python ints). Strict cuts are suffix intersections; the inconsistency
    level search is the same binary search, over bitsets.
``pruned``
    Evidence literals are propagated into every clause (all cuts below the
    evidence level contain them), then the residual clauses are split into
    variable-disjoint components. A cut is satisfiable iff every component's
    cut is, so the level is the max of per-component levels, which are
    cached independently of the query.

Both must agree with :func:`posslearn.possibilistic.naive_poss_entails`.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .logic import Clause, LiteralConjunction, is_satisfiable
from .possibilistic import (
    DEFAULT_CACHE,
    LabeledExample,
    PossTheory,
    QueryCache,
    naive_poss_entails,
)

WORLDS_MAX_VARS = 16


class WorldSpace:
    def __init__(self, variables: Iterable[str]):
        self.vars = tuple(sorted(set(variables)))
        n = len(self.vars)
        if n > 24:
            raise ValueError(f"world space too large: {n} variables")
        self.index = {v: i for i, v in enumerate(self.vars)}
        size = 1 << n
        self.full = (1 << size) - 1
        self.pos = []
        for i in range(n):
            period = 1 << (i + 1)
            half = 1 << i
            block = ((1 << half) - 1) << half
            reps = size // period
            self.pos.append(block * (((1 << (period * reps)) - 1) // ((1 << period) - 1)))
        self._clause_masks: dict = {}

    def lit_mask(self, lit) -> int:
        m = self.pos[self.index[lit.var]]
        return m if lit.positive else self.full ^ m

    def clause_mask(self, c: Clause) -> int:
        m = self._clause_masks.get(c)
        if m is None:
            m = 0
            for l in c.literals:
                m |= self.lit_mask(l)
            self._clause_masks[c] = m
        return m

    def clauses_mask(self, cs: Iterable[Clause]) -> int:
        m = self.full
        for c in cs:
            m &= self.clause_mask(c)
        return m

    def conj_mask(self, conj: LiteralConjunction) -> int:
        m = self.full
        for l in conj.literals:
            m &= self.lit_mask(l)
        return m

    def negated_clause_mask(self, c: Clause) -> int:
        return self.conj_mask(c.negation())


@lru_cache(maxsize=64)
def _space(vars_key: tuple) -> WorldSpace:
    return WorldSpace(vars_key)


def _suffixes(space: WorldSpace, t: PossTheory) -> list:
    k = t.k
    suf = [0] * (k + 1)
    suf[k] = space.clauses_mask(t.hard)
    for j in range(k - 1, -1, -1):
        suf[j] = suf[j + 1] & space.clauses_mask(t.strata[j])
    return suf


def _models_at_level(suf: list, ev: int) -> int:
    """Models of the cut at the inconsistency level for evidence bitset ``ev``."""
    k = len(suf) - 1
    if not ev & suf[k]:
        return suf[k]  # evidence clashes with hard constraints: only the hard cut remains
    lo, hi = 0, k
    while lo < hi:
        mid = (lo + hi) // 2
        if ev & suf[mid]:
            hi = mid
        else:
            lo = mid + 1
    return ev & suf[lo]


def worlds_entails(t: PossTheory, evidence: LiteralConjunction, goal: Clause) -> bool:
    vocab = t.vocabulary | evidence.vars | goal.vars
    space = _space(tuple(sorted(vocab)))
    models = _models_at_level(_suffixes(space, t), space.conj_mask(evidence))
    return not models & space.negated_clause_mask(goal)


# --- pruned DPLL route ------------------------------------------------------------

_COMPONENT_CACHE = QueryCache(maxsize=100_000)


def _component_level(levels: tuple, hard: frozenset) -> int | None:
    """Smallest j with levels[j:] + hard satisfiable; None if even hard alone is not."""
    key = (levels, hard)
    hit = _COMPONENT_CACHE.get(key)
    if hit is not None:
        return hit[0]
    k = len(levels)
    if hard and not is_satisfiable(hard):
        _COMPONENT_CACHE.put(key, (None,))
        return None
    lo, hi = 0, k
    while lo < hi:
        mid = (lo + hi) // 2
        cut = [c for lvl in levels[mid:] for c in lvl]
        cut.extend(hard)
        if is_satisfiable(cut):
            hi = mid
        else:
            lo = mid + 1
    _COMPONENT_CACHE.put(key, (lo,))
    return lo


def _components(items: Sequence[tuple]) -> list:
    """Group (level, clause) items into variable-connected components."""
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, c in items:
        vs = sorted(c.vars)
        for v in vs:
            parent.setdefault(v, v)
        for v in vs[1:]:
            a, b = find(vs[0]), find(v)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for lvl, c in items:
        root = find(next(iter(c.vars)))
        groups.setdefault(root, []).append((lvl, c))
    return [groups[r] for r in sorted(groups)]


def pruned_entails(t: PossTheory, evidence: LiteralConjunction, goal: Clause) -> bool:
    if not evidence.consistent:
        return naive_poss_entails(t, evidence, goal)
    ev = evidence.literals
    neg_ev = frozenset(-l for l in ev)

    def simplify(c: Clause):
        if c.tautology or c.literals & ev:
            return None
        return Clause(c.literals - neg_ev)

    HARD = -1
    floor = 0
    items = []
    for c in t.hard:
        s = simplify(c)
        if s is None:
            continue
        if not s.literals:
            return naive_poss_entails(t, evidence, goal)
        items.append((HARD, s))
    for i, stratum in enumerate(t.strata):
        for c in stratum:
            s = simplify(c)
            if s is None:
                continue
            if not s.literals:
                floor = max(floor, i + 1)
            else:
                items.append((i, s))
    k = t.k
    comps = _components(items)
    level = floor
    comp_data = []
    for comp in comps:
        lv = [set() for _ in range(k)]
        hard = set()
        for i, c in comp:
            (hard if i == HARD else lv[i]).add(c)
        levels = tuple(frozenset(s) for s in lv)
        hard = frozenset(hard)
        cl = _component_level(levels, hard)
        if cl is None:
            return naive_poss_entails(t, evidence, goal)
        level = max(level, cl)
        comp_data.append((levels, hard))

    if goal.tautology or goal.literals & ev:
        return True
    residual = goal.literals - neg_ev
    if not residual:
        return False
    goal_vars = {l.var for l in residual}
    for levels, hard in comp_data:
        cut = [c for lvl in levels[level:] for c in lvl]
        cut.extend(hard)
        cvars = set()
        for c in cut:
            cvars |= c.vars
        touched = goal_vars & cvars
        if not touched:
            continue
        units = [Clause(frozenset([-l])) for l in residual if l.var in touched]
        if not is_satisfiable(cut + units):
            return True
    return False


def entails_with(method: str, t: PossTheory, evidence: LiteralConjunction, goal: Clause) -> bool:
    if method == "naive":
        return naive_poss_entails(t, evidence, goal)
    if method == "pruned":
        return pruned_entails(t, evidence, goal)
    if method in ("worlds", "auto"):
        n = len(t.vocabulary | evidence.vars | goal.vars)
        if n <= WORLDS_MAX_VARS:
            return worlds_entails(t, evidence, goal)
        if method == "worlds":
            raise ValueError(f"worlds method limited to {WORLDS_MAX_VARS} variables, got {n}")
        return pruned_entails(t, evidence, goal)
    raise ValueError(f"unknown method {method!r}")


class Evaluator:
    """Predicts labels for a fixed dataset under many candidate theories.

    Per-example evidence and goal bitsets are computed once; each theory then
    costs one pass of suffix intersections plus a binary search per distinct
    evidence.
    """

    def __init__(self, data: Sequence[LabeledExample], method: str = "auto",
                 extra_vars: Iterable[str] = (), cache: QueryCache | None = DEFAULT_CACHE):
        self.data = list(data)
        self.labels = [e.label for e in self.data]
        self.method = method
        self.cache = cache
        vocab = set(extra_vars)
        for e in self.data:
            vocab |= e.rule.vars
        self.vocab = frozenset(vocab)
        self.space = None
        if method in ("auto", "worlds") and len(vocab) <= WORLDS_MAX_VARS:
            self._build_space(vocab)
        elif method == "worlds":
            raise ValueError(f"worlds method limited to {WORLDS_MAX_VARS} variables")

    def _build_space(self, vocab):
        self.space = WorldSpace(vocab)
        groups: dict = {}
        for idx, e in enumerate(self.data):
            ev = self.space.conj_mask(e.rule.antecedent)
            ng = self.space.negated_clause_mask(e.rule.consequent)
            groups.setdefault(ev, []).append((idx, ng))
        self._groups = list(groups.items())

    def predict(self, t: PossTheory) -> list:
        if self.space is not None:
            if not t.vocabulary <= self.vocab:
                if len(self.vocab | t.vocabulary) > WORLDS_MAX_VARS:
                    return self._predict_dpll(t)
                self.vocab = self.vocab | t.vocabulary
                self._build_space(self.vocab)
            suf = _suffixes(self.space, t)
            preds = [0] * len(self.data)
            for ev, members in self._groups:
                models = _models_at_level(suf, ev)
                for idx, ng in members:
                    preds[idx] = -1 if models & ng else 1
            return preds
        return self._predict_dpll(t)

    def _predict_dpll(self, t: PossTheory) -> list:
        tkey = t.canonical_key()
        out = []
        for e in self.data:
            r = e.rule
            key = (tkey, r.antecedent.literals, r.consequent.literals)
            ans = self.cache.get(key) if self.cache is not None else None
            if ans is None:
                ans = pruned_entails(t, r.antecedent, r.consequent)
                if self.cache is not None:
                    self.cache.put(key, ans)
            out.append(1 if ans else -1)
        return out

    def errors(self, t: PossTheory) -> int:
        return sum(1 for p, y in zip(self.predict(t), self.labels) if p != y)
