import json

import pytest

from homlab import build_algebra, direct_product, parse_spec


def make_algebra(doc):
    return build_algebra(parse_spec(json.dumps(doc)))


SPEC_K2X = {
    "kind": "commutative_quotient",
    "field": {"p": 2},
    "variables": ["x"],
    "relations": ["x^2"],
}
SPEC_K3X = {
    "kind": "commutative_quotient",
    "field": {"p": 3},
    "variables": ["x"],
    "relations": ["x^2"],
}
SPEC_K2XY = {
    "kind": "commutative_quotient",
    "field": {"p": 2},
    "variables": ["x", "y"],
    "relations": ["x*x", "x*y", "y*y"],
}
SPEC_K2X3 = {
    "kind": "commutative_quotient",
    "field": {"p": 2},
    "variables": ["x"],
    "relations": ["x^3"],
}
SPEC_A2 = {
    "kind": "quiver",
    "field": {"p": 2},
    "vertices": 2,
    "arrows": [{"name": "a", "from": 1, "to": 2}],
    "relations": [],
}
SPEC_F2 = {
    "kind": "commutative_quotient",
    "field": {"p": 2},
    "variables": [],
    "relations": [],
}


@pytest.fixture(scope="session")
def k2x():
    """F_2[x]/(x^2): local, radical square zero, self-injective."""
    return make_algebra(SPEC_K2X)


@pytest.fixture(scope="session")
def k3x():
    return make_algebra(SPEC_K3X)


@pytest.fixture(scope="session")
def k2xy():
    """F_2[x,y]/(x,y)^2: local, radical square zero, socle of dimension 2."""
    return make_algebra(SPEC_K2XY)


@pytest.fixture(scope="session")
def k2x3():
    """F_2[x]/(x^3): local with radical cube zero."""
    return make_algebra(SPEC_K2X3)


@pytest.fixture(scope="session")
def quiver_a2():
    """Path algebra of 1 -> 2 over F_2: non-local, radical square zero."""
    return make_algebra(SPEC_A2)


@pytest.fixture(scope="session")
def product_algebra():
    """F_2 x F_2[x]/(x^2): two blocks, commutative, not local."""
    return direct_product(make_algebra(SPEC_F2), make_algebra(SPEC_K2X))
