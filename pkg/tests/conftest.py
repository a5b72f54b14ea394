import pytest

from posslearn.data import parse_dataset
from posslearn.logic import Clause
from posslearn.possibilistic import PossTheory

PENGUIN_DATA = """\
penguin ~> bird ; +
bird ~> flies ; +
penguin ~> !flies ; +
true ~> bird ; -
bird ~> penguin ; -
"""

XY_DATA = """\
true ~> !x ; +
true ~> !y ; +
x ~> a ; +
y ~> b ; +
x & y ~> a ; -
"""


@pytest.fixture
def penguin_examples():
    return parse_dataset(PENGUIN_DATA).examples


@pytest.fixture
def penguin_pool():
    return frozenset(Clause.parse(s) for s in ["bird", "flies", "penguin", "!penguin | !flies"])


@pytest.fixture
def t_star():
    return PossTheory.of(["bird", "penguin"], ["flies"], ["!penguin | !flies"])


@pytest.fixture
def t_2star():
    return PossTheory.of(["flies"], ["!penguin | !flies"])


@pytest.fixture
def xy_examples():
    return parse_dataset(XY_DATA).examples


@pytest.fixture
def xy_pool():
    return frozenset(Clause.parse(s) for s in ["!x", "!y", "!x | a", "!y | b"])


@pytest.fixture
def h_sep():
    return PossTheory.of(["!x"], ["!x | a"], ["!y"], ["!y | b"])


@pytest.fixture
def h_z():
    return PossTheory.of(["!x", "!y"], ["!x | a", "!y | b"])
