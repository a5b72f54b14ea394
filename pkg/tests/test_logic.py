import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posslearn.logic import (
    AUX_PREFIX,
    Clause,
    CnfFormula,
    Literal,
    LiteralConjunction,
    ParseError,
    all_assignments,
    at_least,
    at_most,
    entails,
    find_model,
    is_satisfiable,
)

VARS = ["a", "b", "c", "d", "e"]


@st.composite
def clauses(draw, vars_=VARS, max_len=3):
    lits = draw(st.lists(st.tuples(st.sampled_from(vars_), st.booleans()), min_size=0, max_size=max_len))
    return Clause(frozenset(Literal(v, p) for v, p in lits))


@st.composite
def cnfs(draw, max_clauses=8):
    return CnfFormula(tuple(draw(st.lists(clauses(), max_size=max_clauses))))


def models(f, vars_):
    return [w for w in all_assignments(vars_) if all(c.holds(w) for c in f)]


def test_literal_parse_and_negate():
    l = Literal.parse("!bird")
    assert l == Literal("bird", False)
    assert -l == Literal("bird")
    assert str(l) == "!bird"


@pytest.mark.parametrize("bad", ["", "1x", "true", "false", "!!x", "a b", "x-y"])
def test_literal_parse_rejects(bad):
    with pytest.raises(ParseError):
        Literal.parse(bad)


def test_clause_text_roundtrip_and_sorting():
    c = Clause.parse("penguin | !flies | bird")
    assert str(c) == str(Clause.parse(str(c)))
    assert len(c) == 3


def test_false_is_empty_clause_and_true_is_empty_conjunction():
    assert Clause.parse("false").literals == frozenset()
    assert LiteralConjunction.parse("true").literals == frozenset()
    assert str(LiteralConjunction()) == "true"


def test_tautology_flag():
    assert Clause.parse("x | !x").tautology
    assert not Clause.parse("x | y").tautology


def test_inconsistent_conjunction_flag():
    assert not LiteralConjunction.parse("x & !x").consistent
    assert LiteralConjunction.parse("x & y").consistent


def test_clause_negation_is_units():
    neg = Clause.parse("a | !b").negation()
    assert neg == LiteralConjunction.parse("!a & b")


@given(clauses())
def test_tautologies_hold_everywhere(c):
    if c.tautology:
        assert all(c.holds(w) for w in all_assignments(VARS))


def test_satisfiable_examples():
    assert is_satisfiable([])
    assert not is_satisfiable([Clause.parse("x"), Clause.parse("!x")])
    f = [Clause.parse("!penguin | !flies"), Clause.parse("penguin")]
    w = find_model(f)
    assert w == {"penguin": True, "flies": False}


def test_entails_examples():
    assert entails([Clause.parse("x"), Clause.parse("!x | a")], Clause.parse("a"))
    assert entails([], Clause.parse("x | !x"))
    assert entails([Clause.parse("!p | !f"), Clause.parse("p")], Clause.parse("!f"))
    assert not entails([Clause.parse("x | y")], Clause.parse("x"))


@settings(max_examples=200, deadline=None)
@given(cnfs())
def test_satisfiability_matches_enumeration(f):
    assert is_satisfiable(f) == bool(models(f, VARS))


@settings(max_examples=200, deadline=None)
@given(cnfs(), clauses())
def test_entailment_matches_enumeration(f, c):
    assert entails(f, c) == all(c.holds(w) for w in models(f, VARS))


@settings(max_examples=200, deadline=None)
@given(cnfs())
def test_find_model_is_a_model(f):
    w = find_model(f)
    if w is not None:
        assert f.holds(w)


def projected_models(f: CnfFormula, lits):
    """Assignments to lits that extend to a model of f."""
    base = sorted({l.var for l in lits})
    out = set()
    for w in all_assignments(base):
        units = [Clause(frozenset([Literal(v, w[v])])) for v in base]
        if is_satisfiable(list(f) + units):
            out.add(tuple(w[v] for v in base))
    return out


@pytest.mark.parametrize("n", range(1, 6))
def test_at_least_projection_counts(n):
    lits = [Literal(f"v{i}") for i in range(n)]
    for k in range(n + 1):
        f = at_least(k, lits)
        proj = projected_models(f, lits)
        assert len(proj) == sum(comb(n, j) for j in range(k, n + 1))
        assert all(sum(p) >= k for p in proj)


def test_at_least_with_negative_literals():
    lits = [Literal("x", False), Literal("y"), Literal("z", False)]
    proj = projected_models(at_least(2, lits), lits)
    for x, y, z in itertools.product([False, True], repeat=3):
        assert ((x, y, z) in proj) == ((not x) + y + (not z) >= 2)


def test_at_least_examples():
    x, y, z = Literal("x"), Literal("y"), Literal("z")
    assert len(at_least(0, [x])) == 0
    assert list(at_least(1, [x, y])) == [Clause.of(x, y)]
    assert len(projected_models(at_least(2, [x, y, z]), [x, y, z])) == 4


def test_at_least_aux_names_are_namespaced_and_deterministic():
    lits = [Literal(f"v{i}") for i in range(4)]
    f1, f2 = at_least(2, lits), at_least(2, lits)
    assert f1 == f2
    aux = {v for v in f1.vocabulary if v not in {"v0", "v1", "v2", "v3"}}
    assert aux and all(v.startswith(AUX_PREFIX) for v in aux)


def test_at_least_range_error():
    with pytest.raises(ValueError):
        at_least(3, [Literal("x")])
    with pytest.raises(ValueError):
        at_least(-1, [Literal("x")])


def test_at_most():
    lits = [Literal(f"v{i}") for i in range(4)]
    proj = projected_models(at_most(1, lits), lits)
    assert len(proj) == 5
