import itertools
import random
from fractions import Fraction

import pytest

from posslearn.exact import (
    BRUTE_FORCE_MAX,
    SearchStats,
    SeparationProblem,
    best_stratifications,
    brute_force_separating,
    ordered_partitions,
    qbf_fixture,
    random_problem,
    stratifications,
    stratify_separable,
)
from posslearn.logic import Clause, CnfFormula, Literal, all_assignments
from posslearn.possibilistic import DefaultRule, PossTheory, evaluate


def C(s):
    return Clause.parse(s)


def R(s):
    return DefaultRule.parse(s)


def test_xy_separator(xy_pool, xy_examples, h_sep):
    p = SeparationProblem.from_examples(xy_pool, xy_examples)
    stats = SearchStats()
    t = stratify_separable(p, stats)
    assert t is not None
    assert evaluate(t, xy_examples).errors == 0
    assert t == h_sep
    assert len(stats.distinct_args) <= 2 ** len(xy_pool)
    assert stats.reexpanded == 0


def test_penguin_has_no_separator(penguin_pool, penguin_examples):
    p = SeparationProblem.from_examples(penguin_pool, penguin_examples)
    assert stratify_separable(p) is None
    assert brute_force_separating(p) is None
    assert brute_force_separating(p, allow_subsets=True) is None


def test_unentailable_positive():
    p = SeparationProblem(frozenset([C("x")]), (R("true ~> !x"),), ())
    assert stratify_separable(p) is None
    assert brute_force_separating(p) is None


def test_empty_problem():
    p = SeparationProblem(frozenset(), (), ())
    assert stratify_separable(p) == PossTheory()
    assert brute_force_separating(p) == PossTheory()


def test_root_negative_check():
    # without the check the recursion never tests the negative against {x}
    p = SeparationProblem(frozenset([C("x")]), (), (R("true ~> x"),))
    assert stratify_separable(p) is None
    unchecked = stratify_separable(p, check_root_negatives=False)
    assert unchecked is not None and evaluate(unchecked, p.examples()).errors == 1
    # dropping the formula would separate, which only the subset search sees
    assert brute_force_separating(p) is None
    assert brute_force_separating(p, allow_subsets=True) == PossTheory()


def test_ordered_partition_counts():
    # Fubini numbers
    assert [sum(1 for _ in ordered_partitions(range(n))) for n in range(6)] == [1, 1, 3, 13, 75, 541]
    parts = list(ordered_partitions("abc"))
    assert len({tuple(map(tuple, p)) for p in parts}) == 13


def test_stratifications_with_subsets_count():
    # sum over subsets of Fubini(|subset|): 1 + 4*1 + 6*3 + 4*13 + 75
    pool = [C("a"), C("b"), C("c"), C("d")]
    assert sum(1 for _ in stratifications(pool, allow_subsets=True)) == 150


def test_brute_force_guard():
    pool = frozenset(C(f"v{i}") for i in range(BRUTE_FORCE_MAX + 1))
    with pytest.raises(ValueError):
        brute_force_separating(SeparationProblem(pool, (), ()))


def test_penguin_optima(penguin_pool, penguin_examples, t_star, t_2star):
    err, optima = best_stratifications(penguin_pool, penguin_examples)
    assert err == Fraction(1, 5)
    assert t_star in optima
    assert evaluate(t_2star, penguin_examples).sample_error == err


@pytest.mark.parametrize("seed", range(60))
def test_exact_matches_brute_force(seed):
    p = random_problem(random.Random(seed))
    t = stratify_separable(p)
    b = brute_force_separating(p)
    assert (t is None) == (b is None)
    if t is not None:
        assert set(t.clauses()) == set(p.theory)
        if p.examples():
            assert evaluate(t, p.examples()).errors == 0


def test_memo_bound_on_random_instances():
    for seed in range(40):
        p = random_problem(random.Random(1000 + seed), max_theory=6)
        stats = SearchStats()
        stratify_separable(p, stats)
        assert len(stats.distinct_args) <= 2 ** len(p.theory)
        assert stats.reexpanded == 0


# --- reduction fixture ----------------------------------------------------------------


def exists_forall(phi: CnfFormula, xs, ys) -> bool:
    for wx in all_assignments(sorted(xs)):
        if all(phi.holds({**wx, **wy}) for wy in all_assignments(sorted(ys))):
            return True
    return False


def test_qbf_examples():
    assert stratify_separable(qbf_fixture(CnfFormula.parse("x"), ["x"])) is not None
    assert stratify_separable(qbf_fixture(CnfFormula.parse("y; !y"), [])) is None
    assert stratify_separable(qbf_fixture(CnfFormula.parse("x | !x"), ["x"])) is not None
    p = qbf_fixture(CnfFormula.parse("x"), ["x"])
    assert brute_force_separating(p) is not None


def test_qbf_aux_clash():
    with pytest.raises(ValueError):
        qbf_fixture(CnfFormula.parse("aux | y"), [])
    with pytest.raises(ValueError):
        qbf_fixture(CnfFormula.parse("y"), ["aux_v1"])


def random_phi(rng, xs, ys):
    vocab = xs + ys
    clauses = []
    for _ in range(rng.randint(1, 3)):
        vs = rng.sample(vocab, rng.randint(1, min(2, len(vocab))))
        clauses.append(Clause(frozenset(Literal(v, rng.random() < 0.5) for v in vs)))
    return CnfFormula(tuple(clauses))


@pytest.mark.parametrize("seed", range(40))
def test_qbf_fixture_matches_exists_forall(seed):
    rng = random.Random(seed)
    xs = ["x1", "x2"][: rng.randint(0, 2)]
    ys = ["y1", "y2"][: rng.randint(1, 2)]
    phi = random_phi(rng, xs, ys)
    p = qbf_fixture(phi, xs)
    expected = exists_forall(phi, xs, ys)
    assert (stratify_separable(p) is not None) == expected
    if len(p.theory) <= BRUTE_FORCE_MAX:
        assert (brute_force_separating(p) is not None) == expected
