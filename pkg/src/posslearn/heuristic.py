"""Greedy structure and weight learning of possibilistic theories.

Each iteration samples candidate clauses from misclassified examples,
installs the best (clause, position) pair, shrinks the new clause, prunes
useless clauses and re-places every clause. Ties between placements prefer
fewer strata, then shorter clauses.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence

from .accel import Evaluator
from .logic import Clause
from .possibilistic import LabeledExample, PossTheory

log = logging.getLogger(__name__)


@dataclass
class LearnConfig:
    iterations: int = 100
    timeout: Optional[float] = None  # seconds
    sample_size: int = 10
    rng_seed: int = 0
    hard_constraints: frozenset = frozenset()
    worker_count: int = 1
    method: str = "auto"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        self.hard_constraints = frozenset(self.hard_constraints)


@dataclass
class IterationRecord:
    iteration: int
    errors: int
    n: int
    n_strata: int
    n_clauses: int

    @property
    def sample_error(self) -> float:
        return self.errors / self.n


class _Timeout(Exception):
    pass


# --- scoring ------------------------------------------------------------------------

_WORKER_EVAL: Optional[Evaluator] = None


def _init_worker(data, extra_vars, method):
    global _WORKER_EVAL
    _WORKER_EVAL = Evaluator(data, method=method, extra_vars=extra_vars)


def _worker_errors(theories):
    return [_WORKER_EVAL.errors(t) for t in theories]


class Scorer:
    """Training-error oracle over a fixed dataset, optionally fanned out to processes."""

    def __init__(self, data: Sequence[LabeledExample], extra_vars: Iterable[str] = (),
                 method: str = "auto", workers: int = 1, deadline: Optional[float] = None):
        self.data = list(data)
        self.n = len(self.data)
        extra_vars = tuple(sorted(set(extra_vars)))
        self.evaluator = Evaluator(self.data, method=method, extra_vars=extra_vars)
        self.deadline = deadline
        self.workers = workers
        self._pool = None
        if workers > 1:
            self._pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                             initargs=(self.data, extra_vars, method))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def check_deadline(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Timeout()

    def predict(self, t: PossTheory) -> list:
        return self.evaluator.predict(t)

    def errors(self, t: PossTheory) -> int:
        return self.evaluator.errors(t)

    def errors_many(self, theories: List[PossTheory]) -> List[int]:
        if self._pool is None or len(theories) < 2:
            return [self.evaluator.errors(t) for t in theories]
        size = -(-len(theories) // self.workers)
        chunks = [theories[i:i + size] for i in range(0, len(theories), size)]
        out: List[int] = []
        for part in self._pool.map(_worker_errors, chunks):
            out.extend(part)
        return out


def _as_scorer(data) -> Scorer:
    return data if isinstance(data, Scorer) else Scorer(data)


# --- candidate generation -----------------------------------------------------------


def candidate_clause(e: LabeledExample, antecedent_part, consequent_part) -> Clause:
    """!a' | b' for a positive, !a' | b'' (each literal of b' negated) for a negative.

    ``antecedent_part`` are literals of the antecedent a (they enter negated).
    """
    neg_a = [-l for l in antecedent_part]
    b = list(consequent_part) if e.label == 1 else [-l for l in consequent_part]
    return Clause(frozenset(neg_a + b))


def sample_candidates(misclassified: Sequence[LabeledExample], rng: random.Random,
                      sample_size: int = 10, existing: Optional[PossTheory] = None) -> frozenset:
    if not misclassified:
        raise ValueError("sample_candidates: no misclassified examples")
    chosen = rng.sample(list(misclassified), min(sample_size, len(misclassified)))
    out = set()
    for e in chosen:
        ante = list(e.rule.antecedent)
        cons = list(e.rule.consequent)
        a_part = [l for l in ante if rng.random() < 0.5]
        b_part = [l for l in cons if rng.random() < 0.5]
        if not b_part:
            b_part = [l for l in cons if rng.random() < 0.5]
        if not b_part:
            b_part = [rng.choice(cons)]
        c = candidate_clause(e, a_part, b_part)
        if c.tautology:
            continue
        if existing is not None and (c in existing or c in existing.hard):
            continue
        out.add(c)
    return frozenset(out)


# --- placement ----------------------------------------------------------------------


def placements(t: PossTheory, c: Clause):
    """(rank, theory) for every way to add c, lowest position first."""
    for p in range(t.k + 1):
        yield 2 * p, t.insert_stratum(p, [c])
        if p < t.k:
            yield 2 * p + 1, t.add_to_stratum(p, c)


def _place_best(t: PossTheory, candidates: Iterable[Clause], scorer: Scorer):
    best = None
    for c in sorted(candidates, key=Clause.sort_key):
        scorer.check_deadline()
        opts = list(placements(t, c))
        errs = scorer.errors_many([th for _, th in opts])
        for (rank, th), err in zip(opts, errs):
            key = (err, th.k, len(c), c.sort_key(), rank)
            if best is None or key < best[0]:
                best = (key, th, c)
    if best is None:
        raise ValueError("place_best: no candidates")
    return best[1], best[2], best[0][0]


def place_best(t: PossTheory, candidates: Iterable[Clause], data) -> PossTheory:
    return _place_best(t, candidates, _as_scorer(data))[0]


def _minimize(t: PossTheory, c: Clause, scorer: Scorer):
    cur = scorer.errors(t)
    while len(c) > 1:
        for lit in c:
            scorer.check_deadline()
            smaller = c.without(lit)
            if smaller in t or smaller in t.hard:
                continue
            t2 = t.replace(c, smaller)
            e2 = scorer.errors(t2)
            if e2 <= cur:
                t, c, cur = t2, smaller, e2
                break
        else:
            break
    return t, c


def minimize_clause(t: PossTheory, c: Clause, data) -> PossTheory:
    if c not in t:
        raise KeyError(c)
    return _minimize(t, c, _as_scorer(data))[0]


def _prune(t: PossTheory, scorer: Scorer) -> PossTheory:
    cur = scorer.errors(t)
    for c in t.clauses():
        scorer.check_deadline()
        t2 = t.remove(c)
        e2 = scorer.errors(t2)
        if e2 <= cur:
            t, cur = t2, e2
    return t


def prune_clauses(t: PossTheory, data) -> PossTheory:
    return _prune(t, _as_scorer(data))


def _reoptimize(t: PossTheory, scorer: Scorer) -> PossTheory:
    cur = scorer.errors(t)
    for c in t.clauses():
        t2, _, e2 = _place_best(t.remove(c), [c], scorer)
        assert e2 <= cur, "re-placement lost the original position"
        t, cur = t2, e2
    return t


def reoptimize_weights(t: PossTheory, data) -> PossTheory:
    return _reoptimize(t, _as_scorer(data))


# --- main loop ------------------------------------------------------------------------


def learn(data: Sequence[LabeledExample], cfg: LearnConfig,
          on_iteration: Optional[Callable[[IterationRecord], None]] = None) -> PossTheory:
    """Greedy learner. Returns the working theory after ``cfg.iterations`` or on timeout.

    An iteration whose result has higher training error than the theory it
    started from is rolled back, so training error never increases.
    """
    data = list(data)
    if not data:
        raise ValueError("learn: empty dataset")
    for e in data:
        if not e.rule.consequent.literals:
            raise ValueError(f"rule with empty consequent: {e.rule}")
    deadline = time.monotonic() + cfg.timeout if cfg.timeout else None
    hard = cfg.hard_constraints
    extra = set()
    for c in hard:
        extra |= c.vars
    rng = random.Random(cfg.rng_seed)
    t = PossTheory((), hard)
    with Scorer(data, extra, cfg.method, cfg.worker_count, deadline) as scorer:
        cur = scorer.errors(t)
        for it in range(1, cfg.iterations + 1):
            preds = scorer.predict(t)
            mis = [e for e, p in zip(data, preds) if p != e.label]
            if not mis:
                break
            cands = sample_candidates(mis, rng, cfg.sample_size, t)
            if cands:
                try:
                    t2, c, _ = _place_best(t, cands, scorer)
                    t2, c = _minimize(t2, c, scorer)
                    t2 = _prune(t2, scorer)
                    t2 = _reoptimize(t2, scorer)
                except _Timeout:
                    log.info("timeout during iteration %d", it)
                    break
                e2 = scorer.errors(t2)
                if e2 <= cur:
                    t, cur = t2, e2
            if on_iteration is not None:
                on_iteration(IterationRecord(it, cur, len(data), t.k, len(t.clauses())))
            if deadline is not None and time.monotonic() > deadline:
                break
    return t
