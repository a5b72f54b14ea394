import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from posslearn.sat import solve_int_cnf


def brute(nvars, clauses):
    for bits in itertools.product([False, True], repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def check_model(model, clauses):
    return all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)


@st.composite
def int_cnf(draw):
    n = draw(st.integers(1, 10))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=4), max_size=30))
    return n, clauses


@settings(max_examples=300, deadline=None)
@given(int_cnf())
def test_solver_agrees_with_enumeration(inst):
    n, clauses = inst
    model = solve_int_cnf(n, clauses)
    assert (model is not None) == brute(n, clauses)
    if model is not None:
        assert check_model(model, clauses)


def test_empty_clause_unsat():
    assert solve_int_cnf(2, [[1], []]) is None


def test_empty_formula_sat():
    assert solve_int_cnf(3, []) is not None


def test_tautology_and_duplicates():
    m = solve_int_cnf(2, [[1, -1], [2, 2], [-2, -2, 1]])
    assert m is not None and m[1] and m[2]


def test_pigeonhole_3_into_2_unsat():
    # p(i,j): pigeon i in hole j, var = 2*i + j + 1
    v = lambda i, j: 2 * i + j + 1
    clauses = [[v(i, 0), v(i, 1)] for i in range(3)]
    for j in range(2):
        for a, b in itertools.combinations(range(3), 2):
            clauses.append([-v(a, j), -v(b, j)])
    assert solve_int_cnf(6, clauses) is None
