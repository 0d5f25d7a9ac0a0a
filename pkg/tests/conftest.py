"""Shared fixtures: the reference geometry and potential builders."""

import pytest

from sltrace import PotentialSpec, ProblemSpec, validate_problem

# reference geometry used throughout: unit interval, splits at 0.3/0.7,
# scalings (2, 3), Neumann-left, h = 0
P0 = dict(a=0.0, b=1.0, c1=0.3, c2=0.7, delta=2.0, gamma=3.0, h=0.0)


def make_problem(coeffs=(0.0,), **overrides):
    """Validated problem on the reference geometry.

    coeffs is one ascending coefficient list applied to all three pieces
    (a globally defined polynomial); pass pieces=[...] to give each piece
    its own list.
    """
    kw = dict(P0)
    pieces = overrides.pop("pieces", None)
    kw.update(overrides)
    if pieces is None:
        pieces = [list(coeffs)] * 3
    return validate_problem(ProblemSpec(
        potential=PotentialSpec.polynomial(pieces), **kw))


@pytest.fixture
def p_free():
    """q = 0 on the reference geometry."""
    return make_problem([0.0])


@pytest.fixture
def p_const():
    """q = 1 on the reference geometry."""
    return make_problem([1.0])


@pytest.fixture
def p_linear():
    """q(x) = x on the reference geometry."""
    return make_problem([0.0, 1.0])
