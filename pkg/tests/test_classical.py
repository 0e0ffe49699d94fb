import pytest
from hypothesis import given, settings

from pomstar.algebra import GeneratorSet, OperatorPoly, mul, scommutator
from pomstar.classical import ClassicalSymbol, dirac_bracket, moyal, poisson, weyl_order, weyl_symbol
from pomstar.constraints import ConstraintError
from pomstar.render import render
from pomstar.scalar import GaussianRational, Rational
from oracles import weyl_brute
from strategies import operators, symbols

B1 = GeneratorSet.bosonic(1)
B2 = GeneratorSet.bosonic(2)
ODD = GeneratorSet.with_odd(2, [1])


def _v(gens, slot):
    return ClassicalSymbol.variable(gens, slot)


def test_moyal_examples():
    q, p = _v(B1, 0), _v(B1, 1)
    half_ih = ClassicalSymbol.constant(B1, GaussianRational(0, Rational(1, 2)), 1)
    assert moyal(q, p) == q * p + half_ih
    assert moyal(q, q) == q * q
    assert moyal(q, p) - moyal(p, q) == ClassicalSymbol.constant(B1, GaussianRational(0, 1), 1)
    assert repr(moyal(q * p, q * p))  # renders without error


@settings(max_examples=40, deadline=None)
@given(symbols(B2, 3), symbols(B2, 3), symbols(B2, 2))
def test_moyal_associative(f, g, h):
    assert moyal(moyal(f, g), h) == moyal(f, moyal(g, h))


@settings(max_examples=40, deadline=None)
@given(symbols(B2, 3), symbols(B2, 3))
def test_moyal_commutator_starts_with_poisson(f, g):
    diff = moyal(f, g) - moyal(g, f)
    coeffs = dict(diff.hbar_coeffs())
    bracket = poisson(f, g).scale(GaussianRational(0, 1))
    assert coeffs.get(1, ClassicalSymbol(B2)) == bracket
    assert all(h % 2 == 1 for h in coeffs)


@settings(max_examples=40, deadline=None)
@given(operators(B2, 3), operators(B2, 3))
def test_moyal_is_weyl_image_of_operator_product(x, y):
    assert weyl_symbol(mul(x, y)) == moyal(weyl_symbol(x), weyl_symbol(y))


@pytest.mark.parametrize(
    "gens,exps",
    [
        (B1, (2, 2)),
        (B1, (3, 1)),
        (B2, (1, 1, 1, 1)),
        (B2, (2, 0, 1, 1)),
        (ODD, (1, 0, 1, 0)),
        (ODD, (1, 1, 1, 0)),
        (ODD, (1, 1, 1, 1)),
    ],
)
def test_weyl_order_matches_symmetrized_average(gens, exps):
    sym = ClassicalSymbol(gens, {(exps, 0): GaussianRational(1)})
    assert weyl_order(sym) == weyl_brute(gens, exps)


def test_weyl_symbol_values():
    g = B1
    q, p = OperatorPoly.q(g, 1), OperatorPoly.p(g, 1)
    sym = weyl_symbol(mul(q * q, p * p))
    assert sym == (
        _v(g, 0) * _v(g, 0) * _v(g, 1) * _v(g, 1)
        + (_v(g, 0) * _v(g, 1)).scale(GaussianRational(0, 2), 1)
        + ClassicalSymbol.constant(g, GaussianRational(Rational(-1, 2)), 2)
    )
    th, pth = OperatorPoly.q(ODD, 1), OperatorPoly.p(ODD, 1)
    assert weyl_symbol(mul(th, pth)) == ClassicalSymbol.from_operator(mul(th, pth)) + ClassicalSymbol.constant(
        ODD, GaussianRational(0, Rational(1, 2)), 1
    )


@settings(max_examples=50, deadline=None)
@given(operators(ODD, 4, 4))
def test_weyl_round_trip(x):
    assert weyl_order(weyl_symbol(x)) == x


def test_moyal_rejects_odd_generators():
    with pytest.raises(ValueError):
        moyal(_v(ODD, 0), _v(ODD, 2))


def test_supercommutative_product():
    th, pth = _v(ODD, 0), _v(ODD, 2)
    assert th * pth == -(pth * th)
    assert (th * th).is_zero()


def test_dirac_bracket():
    g = GeneratorSet.bosonic(3)
    q = [_v(g, i) for i in range(3)]
    p = [_v(g, 3 + i) for i in range(3)]
    cons = [q[0] + q[2], p[0], q[1], p[1] + p[2]]
    one = ClassicalSymbol.constant(g, 1)
    assert dirac_bracket(q[2], p[2], cons) == one
    assert dirac_bracket(q[0], p[0], cons).is_zero()
    assert dirac_bracket(q[0], p[2], cons) == -one
    assert dirac_bracket(q[2], q[2], cons).is_zero()
    with pytest.raises(ConstraintError):
        dirac_bracket(q[0], p[0], [q[0] * q[0], p[0]])


def test_naive_operator_is_normal_ordering():
    x = ClassicalSymbol.variable(B1, 0) * ClassicalSymbol.variable(B1, 1)
    assert render(x.to_operator_naive()) == "q1*p1"
    assert scommutator(OperatorPoly.q(B1, 1), x.to_operator_naive()) == OperatorPoly.q(B1, 1).scale(
        GaussianRational(0, 1), 1
    )
