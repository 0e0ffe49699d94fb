import pytest
from hypothesis import given, settings

from pomstar.algebra import GeneratorSet, OperatorPoly, mul, scommutator, ssym
from pomstar.parser import BinOp, Bracket, ParseError, parse, parse_operator, split_top_level
from pomstar.render import render
from pomstar.scalar import GaussianRational, Rational
from strategies import operators

G = GeneratorSet.with_odd(3, [1])
B2 = GeneratorSet.bosonic(2)

CORPUS = [
    "q2*p2 + i*hbar/2",
    "comm(q2, p2)",
    "sym(q2^2, p2)",
    "th1*pth1 - 3*i*hbar^2*q3^2",
    "(1/2 + 3*i)*p2",
    "-(i/2)*hbar",
    "p2*q2^2 - q2",
    "pth1*th1*p3^3",
    "(q2 + p3)^3",
    "-(-q2)",
    "7",
    "0",
]


def test_parse_shapes():
    ast = parse("q1*p1 + i*hbar/2")
    assert isinstance(ast, BinOp) and ast.op == "+"
    ast = parse("comm(q1,p1)")
    assert isinstance(ast, Bracket) and ast.kind == "comm"


@pytest.mark.parametrize("src", CORPUS)
def test_render_parse_round_trip(src):
    op = parse_operator(src, G)
    assert parse_operator(render(op), G) == op


@settings(max_examples=100, deadline=None)
@given(operators(G, 4, 5))
def test_round_trip_random(op):
    assert parse_operator(render(op), G) == op


def test_rendering_examples():
    assert render(OperatorPoly.constant(B2, GaussianRational(0, Rational(1, 2)), 1)) == "(i/2)*hbar"
    x = mul(OperatorPoly.q(B2, 2), OperatorPoly.p(B2, 2))
    assert render(x) == "q2*p2"
    assert render(OperatorPoly.zero(B2)) == "0"
    assert render(-x) == "-q2*p2"
    y = OperatorPoly.constant(B2, GaussianRational(Rational(1, 2), -1))
    assert render(y) == "(1/2 - i)"


def test_bracket_builtins():
    ih = OperatorPoly.constant(G, GaussianRational(0, 1), 1)
    assert parse_operator("comm(q2,p2)", G) == ih
    assert parse_operator("sym(q2,p2)", G) == ssym(OperatorPoly.q(G, 2), OperatorPoly.p(G, 2))
    # graded bracket for odd generators
    assert parse_operator("comm(th1,pth1)", G) == scommutator(OperatorPoly.q(G, 1), OperatorPoly.p(G, 1))


@pytest.mark.parametrize(
    "src,kind,pos",
    [
        ("th1^2", "odd_power", (1, 4)),
        ("q2 +", "syntax", (1, 5)),
        ("x1", "unknown_generator", (1, 1)),
        ("q0", "unknown_generator", (1, 1)),
        ("q2\n  + $", "lexical", (2, 5)),
        ("q2/hbar", "division", (1, 3)),
        ("q2/0", "division", (1, 3)),
        ("comm(q2)", "syntax", (1, 8)),
        ("q2 q3", "syntax", (1, 4)),
        ("q1", "unknown_generator", (1, 1)),
        ("p9", "unknown_generator", (1, 1)),
    ],
)
def test_diagnostics_carry_positions(src, kind, pos):
    with pytest.raises(ParseError) as info:
        parse_operator(src, G)
    assert info.value.kind == kind
    assert (info.value.line, info.value.column) == pos


def test_split_top_level_respects_parentheses():
    assert split_top_level("q1, comm(q2,p2) ,p1") == ["q1", "comm(q2,p2)", "p1"]
    assert split_top_level("") == []
