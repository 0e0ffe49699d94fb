import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pomstar.algebra import OperatorPoly, mul, scommutator, ssym
from pomstar.classical import weyl_order, weyl_symbol
from pomstar.constraints import ConstraintError, ConstraintSystem
from pomstar.projection import (
    expansion_term,
    project,
    project_system,
    projector_generating,
    resolution_generating,
    resolution_sum,
    series_216,
    series_217,
)
from pomstar.randops import random_operator
from pomstar.render import render
from pomstar.scalar import GaussianRational
from conftest import SYSTEMS, bosonic_three
from oracles import project_term_by_term, restrict_symbol

# slots of the constrained pair(s), as (position slot, momentum slot)
CONSTRAINED = {"N2M1": [0, 2], "odd": [0, 3]}


def _ops(sys, count, degree, seed, parity=0):
    rng = random.Random(seed)
    return [random_operator(rng, sys.gens, degree, parity, 4) for _ in range(count)]


def test_golden_values(sys2):
    g = sys2.gens
    q1, p1, q2, p2 = OperatorPoly.q(g, 1), OperatorPoly.p(g, 1), OperatorPoly.q(g, 2), OperatorPoly.p(g, 2)
    assert project(q2, sys2) == q2
    assert project(q1, sys2).is_zero()
    assert render(project(mul(q1, p1), sys2)) == "(i/2)*hbar"
    assert render(project(mul(p1, q1), sys2)) == "-(i/2)*hbar"
    assert project(ssym(q1, p1), sys2).is_zero()
    assert render(project(mul(q1, q1) + mul(q2, p2), sys2)) == "q2*p2"


def test_golden_values_n3m2(sys3):
    g = sys3.gens
    q3, p3 = OperatorPoly.q(g, 3), OperatorPoly.p(g, 3)
    for x in (q3, p3, mul(q3, p3)):
        px = project(x, sys3)
        assert project(px, sys3) == px
    assert project(sys3.constraints[0], sys3).is_zero()


@pytest.mark.parametrize("name", list(SYSTEMS))
def test_idempotent_and_kills_constraints(name):
    sys = SYSTEMS[name]()
    for x in _ops(sys, 15, 3, 1):
        px = project(x, sys)
        assert project(px, sys) == px
        for z in sys.z:
            assert project(ssym(z, x), sys).is_zero()


@pytest.mark.parametrize("name", list(SYSTEMS))
def test_series_matches_term_by_term_oracle(name):
    sys = SYSTEMS[name]()
    top = 3 if sys.m == 1 else 2
    for x in _ops(sys, 6, top, 2):
        assert project(x, sys, method="series") == project_term_by_term(x, sys)


def test_factored_equals_series(sys3):
    for x in _ops(sys3, 10, 3, 3):
        assert project(x, sys3, method="factored") == project(x, sys3, method="series")


def test_unknown_method(sys2):
    with pytest.raises(ValueError):
        project(OperatorPoly.q(sys2.gens, 1), sys2, method="nope")


@pytest.mark.parametrize("name", ["N2M1", "odd"])
def test_projection_is_weyl_restriction(name):
    # for a single canonical constrained pair the projector drops that pair
    # from the Weyl symbol
    sys = SYSTEMS[name]()
    for x in _ops(sys, 12, 3, 4):
        expected = weyl_order(restrict_symbol(weyl_symbol(x), CONSTRAINED[name]))
        assert project(x, sys) == expected


@pytest.mark.parametrize("name", list(SYSTEMS))
def test_resolution_forms(name):
    sys = SYSTEMS[name]()
    for x in _ops(sys, 5, 3 if sys.m == 1 else 2, 5):
        assert resolution_sum(x, sys) == x
        assert resolution_generating(x, sys, "minus") == x
        assert resolution_generating(x, sys, "plus") == x
        assert projector_generating(x, sys) == project(x, sys)


def test_expansion_terms(sys2):
    g = sys2.gens
    q1, p1, q2, p2 = OperatorPoly.q(g, 1), OperatorPoly.p(g, 1), OperatorPoly.q(g, 2), OperatorPoly.p(g, 2)
    assert expansion_term("C", 0, q2, p2, sys2) == scommutator(q2, p2)
    assert not expansion_term("S", 1, q1, p1, sys2).is_zero()
    assert expansion_term("C", 1, q2, p2, sys2).is_zero()
    with pytest.raises(ValueError):
        expansion_term("X", 0, q1, p1, sys2)
    with pytest.raises(ValueError):
        expansion_term("C", -1, q1, p1, sys2)


def test_series_examples(sys2):
    g = sys2.gens
    q1, p1, q2, p2 = OperatorPoly.q(g, 1), OperatorPoly.p(g, 1), OperatorPoly.q(g, 2), OperatorPoly.p(g, 2)
    ih = OperatorPoly.constant(g, GaussianRational(0, 1), 1)
    assert series_216("commutator", q2, p2, sys2) == ih
    assert series_216("symmetrized", q1, p1, sys2).is_zero()
    assert series_216("symmetrized", q2, p2, sys2) == ssym(q2, p2)
    assert series_217("commutator", q2, p2, sys2) == ih
    with pytest.raises(ValueError):
        series_216("other", q2, p2, sys2)


@pytest.mark.parametrize("name", list(SYSTEMS))
@pytest.mark.parametrize("kind", ["commutator", "symmetrized"])
def test_bracket_series_identities(name, kind):
    sys = SYSTEMS[name]()
    bracket = scommutator if kind == "commutator" else ssym
    rng = random.Random(6)
    for _ in range(6):
        ex = rng.randint(0, 1) if sys.s or any(sys.gens.parities) else 0
        x = random_operator(rng, sys.gens, 3, ex, 3)
        y = random_operator(rng, sys.gens, 3, 0, 3)
        assert series_216(kind, x, y, sys) == bracket(project(x, sys), project(y, sys))
        assert series_217(kind, x, y, sys) == project(bracket(x, y), sys)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_projection_is_linear(seed):
    sys = bosonic_three()
    x, y = _ops(sys, 2, 2, seed)
    c = GaussianRational(2, -1)
    assert project(x.scale(c) + y, sys) == project(x, sys).scale(c) + project(y, sys)


def test_project_system(any_sys):
    red = project_system(any_sys)
    assert len(red.pairs) == any_sys.n - any_sys.m
    assert red.check() == []


def test_project_system_with_hamiltonian(sys2):
    g = sys2.gens
    h = mul(OperatorPoly.p(g, 1), OperatorPoly.p(g, 1)) + mul(OperatorPoly.p(g, 2), OperatorPoly.p(g, 2))
    red = project_system(sys2, h)
    assert red.hamiltonian == mul(OperatorPoly.p(g, 2), OperatorPoly.p(g, 2))


def test_nonlinear_needs_order(sys2):
    g = sys2.gens
    q1, p1, q2 = OperatorPoly.q(g, 1), OperatorPoly.p(g, 1), OperatorPoly.q(g, 2)
    sys = ConstraintSystem.from_accs([(q1 + mul(q2, q2), p1)])
    with pytest.raises(ConstraintError, match="truncation order"):
        project(q1, sys)
    with pytest.raises(ConstraintError):
        project(q1, sys, method="factored")
    with pytest.raises(ConstraintError):
        project_system(sys)
    # the constraint itself is annihilated at every truncation order
    xi = q1 + mul(q2, q2)
    assert project(xi, sys, order=2).is_zero()
