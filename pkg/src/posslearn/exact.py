"""Exact search for separating stratifications, plus brute-force oracles.

``stratify_separable`` peels the lowest level off the theory: it chooses the
formulas ``T'`` that stay above it, requires every still-uncovered positive
to be classically entailed by ``T' + {a}`` and every negative to be either
inconsistent with or not entailed by ``T' + {a}``, then recurses on ``T'``.
Failed first arguments are remembered in ``closed``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, List, Optional, Sequence

from .accel import Evaluator
from .logic import Clause, CnfFormula, Literal, LiteralConjunction, entails, is_satisfiable
from .possibilistic import DefaultRule, LabeledExample, PossTheory

BRUTE_FORCE_MAX = 6


@dataclass(frozen=True)
class SeparationProblem:
    theory: frozenset
    positives: tuple = ()
    negatives: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "theory", frozenset(self.theory))
        object.__setattr__(self, "positives", tuple(self.positives))
        object.__setattr__(self, "negatives", tuple(self.negatives))

    @classmethod
    def from_examples(cls, theory: Iterable[Clause], examples: Iterable[LabeledExample]):
        examples = list(examples)
        return cls(frozenset(theory),
                   tuple(e.rule for e in examples if e.label == 1),
                   tuple(e.rule for e in examples if e.label == -1))

    def examples(self) -> List[LabeledExample]:
        return ([LabeledExample(r, 1) for r in self.positives]
                + [LabeledExample(r, -1) for r in self.negatives])


@dataclass
class SearchStats:
    impl_calls: int = 0
    distinct_args: set = field(default_factory=set)
    closed_hits: int = 0
    classical_queries: int = 0
    reexpanded: int = 0


class _Classical:
    """Cached classical checks on T' + {a}."""

    def __init__(self, stats: SearchStats):
        self.stats = stats
        self._sat: dict = {}
        self._ent: dict = {}

    def consistent(self, t: frozenset, a: LiteralConjunction) -> bool:
        key = (t, a.literals)
        v = self._sat.get(key)
        if v is None:
            self.stats.classical_queries += 1
            v = self._sat[key] = is_satisfiable(list(t) + a.as_units())
        return v

    def entails(self, t: frozenset, a: LiteralConjunction, b: Clause) -> bool:
        key = (t, a.literals, b.literals)
        v = self._ent.get(key)
        if v is None:
            self.stats.classical_queries += 1
            v = self._ent[key] = entails(list(t) + a.as_units(), b)
        return v

    def covered(self, t, r: DefaultRule) -> bool:
        return self.consistent(t, r.antecedent) and self.entails(t, r.antecedent, r.consequent)


def _subsets_desc(t: frozenset) -> Iterator[frozenset]:
    """Proper subsets of t, largest first, lexicographic within a size."""
    items = sorted(t, key=Clause.sort_key)
    for size in range(len(items) - 1, -1, -1):
        for combo in combinations(items, size):
            yield frozenset(combo)


def stratify_separable(p: SeparationProblem, stats: Optional[SearchStats] = None,
                       check_root_negatives: bool = True) -> Optional[PossTheory]:
    """A stratification of all of ``p.theory`` separating the examples, or None.

    With ``check_root_negatives`` (the default) a negative covered by the
    whole theory at the top rejects the problem up front; without it, the
    recursion never tests negatives against the full theory and may return a
    stratification that covers one.
    """
    if stats is None:
        stats = SearchStats()
    ck = _Classical(stats)
    closed: set = set()
    negatives = p.negatives
    full = p.theory

    def impl(t: frozenset, pos: list):
        stats.impl_calls += 1
        stats.distinct_args.add(t)
        if t in closed:
            stats.closed_hits += 1
            return None
        if not t and not pos:
            return []
        for tp in _subsets_desc(t):
            if not all(ck.entails(tp, r.antecedent, r.consequent) for r in pos):
                continue
            if any(ck.covered(tp, r) for r in negatives):
                continue
            rest = [r for r in pos if not ck.covered(tp, r)]
            strat = impl(tp, rest)
            if strat is not None:
                return [t - tp] + strat
        if t in closed:
            stats.reexpanded += 1
        closed.add(t)
        return None

    if check_root_negatives and any(ck.covered(full, r) for r in negatives):
        return None
    rest = [r for r in p.positives if not ck.covered(full, r)]
    levels = impl(full, rest)
    if levels is None:
        return None
    return PossTheory(tuple(levels))


# --- brute force ----------------------------------------------------------------


def ordered_partitions(items: Sequence) -> Iterator[list]:
    """All ordered partitions of ``items`` (lowest block first), deterministically."""
    items = list(items)
    if not items:
        yield []
        return
    n = len(items)
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            block = [items[i] for i in idx]
            rest = [items[i] for i in range(n) if i not in idx]
            for tail in ordered_partitions(rest):
                yield [block] + tail


def stratifications(theory: Iterable[Clause], allow_subsets: bool = False) -> Iterator[PossTheory]:
    items = sorted(theory, key=Clause.sort_key)
    if allow_subsets:
        pools = (list(c) for size in range(len(items), -1, -1) for c in combinations(items, size))
    else:
        pools = iter([items])
    for pool in pools:
        for part in ordered_partitions(pool):
            yield PossTheory(tuple(frozenset(b) for b in part))


def brute_force_separating(p: SeparationProblem, allow_subsets: bool = False) -> Optional[PossTheory]:
    """First separating stratification in enumeration order, or None.

    By default only ordered partitions of the whole theory are considered,
    matching ``stratify_separable``. ``allow_subsets`` also tries every
    subset of the theory; it can find separators the full-partition search
    cannot (a formula left out entails nothing).
    """
    if len(p.theory) > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX} formulas")
    data = p.examples()
    if not data:
        return next(stratifications(p.theory, allow_subsets))
    ev = Evaluator(data)
    for t in stratifications(p.theory, allow_subsets):
        if ev.errors(t) == 0:
            return t
    return None


def best_stratifications(theory: Iterable[Clause], data: Sequence[LabeledExample],
                         allow_subsets: bool = False):
    """Minimum training error over all stratifications and every optimum."""
    theory = frozenset(theory)
    if len(theory) > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX} formulas")
    ev = Evaluator(data)
    best = None
    optima: List[PossTheory] = []
    for t in stratifications(theory, allow_subsets):
        err = ev.errors(t)
        if best is None or err < best:
            best, optima = err, [t]
        elif err == best:
            optima.append(t)
    return Fraction(best, len(data)), optima


# --- reduction fixture ------------------------------------------------------------


def _clausify_implication(phi: CnfFormula, aux: str) -> List[Clause]:
    """Clauses for phi -> aux.

    A single clause C gives !l | aux per literal. Several clauses use one
    fresh variable per clause, standing for "this clause is violated".
    """
    a = Literal(aux)
    cls = list(phi)
    if not cls:
        return [Clause(frozenset([a]))]
    if len(cls) == 1:
        return [Clause(frozenset([-l, a])) for l in cls[0]]
    out = []
    viol = [Literal(f"{aux}_v{i}") for i in range(1, len(cls) + 1)]
    out.append(Clause(frozenset([a, *viol])))
    for d, c in zip(viol, cls):
        for l in c:
            out.append(Clause(frozenset([-d, -l])))
    return out


def qbf_fixture(phi: CnfFormula, xs: Iterable[str], aux: str = "aux") -> SeparationProblem:
    """Separation problem that is solvable iff exists X forall Y: phi."""
    xs = sorted(set(xs))
    vocab = phi.vocabulary | set(xs)
    clash = [v for v in vocab if v == aux or v.startswith(aux + "_v")]
    if clash:
        raise ValueError(f"variable(s) {clash} clash with auxiliary name {aux!r}")
    theory = set()
    for x in xs:
        theory.add(Clause(frozenset([Literal(x)])))
        theory.add(Clause(frozenset([Literal(x, False)])))
    theory.update(_clausify_implication(phi, aux))
    goal = DefaultRule(LiteralConjunction(), Clause(frozenset([Literal(aux)])))
    return SeparationProblem(frozenset(theory), (goal,), ())


def random_problem(rng, n_vars: int = 4, max_theory: int = 5, max_examples: int = 6,
                   max_len: int = 2) -> SeparationProblem:
    """Small random instance: clause pool and labelled rules over ``n_vars`` variables."""
    vocab = [f"v{i}" for i in range(n_vars)]

    def lits(lo, hi):
        vs = rng.sample(vocab, rng.randint(lo, hi))
        return frozenset(Literal(v, rng.random() < 0.5) for v in sorted(vs))

    theory = set()
    for _ in range(rng.randint(1, max_theory)):
        theory.add(Clause(lits(1, max_len)))
    pos, neg = [], []
    for _ in range(rng.randint(1, max_examples)):
        r = DefaultRule(LiteralConjunction(lits(0, max_len)), Clause(lits(1, 1)))
        (pos if rng.random() < 0.5 else neg).append(r)
    return SeparationProblem(frozenset(theory), tuple(pos), tuple(neg))
