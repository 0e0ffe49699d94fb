import pytest

from pomstar.algebra import GeneratorSet, OperatorPoly, scommutator
from pomstar.constraints import (
    ConstraintError,
    ConstraintSystem,
    bracket_value,
    build_accs_linear,
    is_linear,
    j_matrices,
    matmul_int,
    validate_accs,
)
from pomstar.scalar import GaussianRational


def _ident(size):
    return tuple(tuple(int(i == j) for j in range(size)) for i in range(size))


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("s", [0, 1])
def test_j_matrices_are_inverse(m, s):
    up, low = j_matrices(m, s)
    assert matmul_int(up, low) == _ident(2 * m)
    assert matmul_int(low, up) == _ident(2 * m)
    # graded symmetry J^{ab} = -(-1)^s J^{ba}
    for a in range(2 * m):
        for b in range(2 * m):
            assert up[a][b] == -((-1) ** s) * up[b][a]


def test_j_matrix_values():
    assert j_matrices(1, 0) == (((0, 1), (-1, 0)), ((0, -1), (1, 0)))
    assert j_matrices(1, 1) == (((0, 1), (1, 0)), ((0, 1), (1, 0)))


def test_j_matrix_rejects_bad_input():
    with pytest.raises(ConstraintError):
        j_matrices(0, 0)
    with pytest.raises(ConstraintError):
        j_matrices(1, 2)


def test_partner(sys3):
    assert [sys3.partner(b) for b in range(4)] == [(2, -1), (3, -1), (0, 1), (1, 1)]


def test_canonical_brackets(any_sys):
    size = 2 * any_sys.m
    for a in range(size):
        for b in range(size):
            got = scommutator(any_sys.z[a], any_sys.z[b])
            want = OperatorPoly.constant(any_sys.gens, GaussianRational(0, any_sys.jup[a][b]), 1)
            assert got == want


def test_validation_passes(any_sys):
    report = validate_accs(any_sys, probe_degree=2)
    assert report.passed, report.first_failure
    assert [c.name for c in report.checks] == [
        "parity",
        "size",
        "canonical_brackets",
        "j_inverse",
        "hyper_relations",
    ]


def test_builder_spans_input(sys3):
    z = sys3.z
    assert sys3.m == 2 and sys3.s == 0 and sys3.linear
    # every input constraint commutes with the same things as the ACCS span
    for c in sys3.constraints:
        assert any(bracket_value(c, zz) for zz in z)
    describe = sys3.describe()
    assert describe["pairs"] == 3 and describe["accs_parity"] == 0
    assert len(describe["accs"]) == 2


def test_odd_system(sys_odd):
    assert sys_odd.s == 1 and sys_odd.m == 1
    assert sys_odd.describe()["odd_pairs"] == [1, 2]
    assert sys_odd.jup == ((0, 1), (1, 0))


def test_pair_systems(sys2, sys3):
    assert sys2.pair_systems() == (sys2,)
    parts = sys3.pair_systems()
    assert len(parts) == 2 and all(p.m == 1 for p in parts)
    assert parts[0].accs[0] == sys3.accs[0]


B3 = GeneratorSet.bosonic(3)
q = lambda i: OperatorPoly.q(B3, i)  # noqa: E731
p = lambda i: OperatorPoly.p(B3, i)  # noqa: E731


@pytest.mark.parametrize(
    "constraints,message",
    [
        ([], "no constraints"),
        ([q(1)], "even number"),
        ([q(1), q(2)], "degenerate"),
        ([q(1), p(1), q(2), p(2), q(3), p(3)], "need 2M < 2N"),
        ([q(1), p(1), q(1) + p(1), q(2)], "degenerate"),
        ([q(1) * q(1), p(1)], "nonlinear"),
        ([q(1) + 1, p(1)], "nonlinear"),
    ],
)
def test_builder_errors(constraints, message):
    with pytest.raises(ConstraintError, match=message):
        build_accs_linear(constraints)


def test_mixed_parity_rejected():
    g = GeneratorSet.with_odd(2, [1])
    with pytest.raises(ConstraintError, match="mixed-parity"):
        build_accs_linear([OperatorPoly.q(g, 1) + OperatorPoly.q(g, 2), OperatorPoly.p(g, 2)])


def test_odd_non_isotropic_pivot():
    g = GeneratorSet.with_odd(2, [1, 2])
    th, pth = OperatorPoly.q(g, 1), OperatorPoly.p(g, 1)
    with pytest.raises(ConstraintError, match="isotropic"):
        build_accs_linear([th + pth, th - pth])


def test_validation_reports_bad_accs():
    sys = ConstraintSystem.from_accs([(q(1), p(1).scale(2))])
    report = validate_accs(sys, probe_degree=1)
    assert not report.passed
    assert report.first_failure.name == "canonical_brackets"
    assert "expected" in report.first_failure.detail


def test_from_accs_parity_mismatch():
    with pytest.raises(ConstraintError):
        ConstraintSystem.from_accs([(q(1), p(1))], s=1)
    with pytest.raises(ConstraintError):
        ConstraintSystem.from_accs([])


def test_is_linear_and_bracket_value():
    assert is_linear(q(1) + p(2))
    assert not is_linear(q(1) * p(1))
    assert bracket_value(q(1), p(1)) == GaussianRational(1)
    assert bracket_value(q(1), q(2)) == GaussianRational(0)
    assert bracket_value(q(1), p(1) * p(1)) is None


def test_nonlinear_accs_accepted():
    # x = q1 + q2^2 style pairs are allowed when supplied explicitly
    xi, pi = q(1) + q(2) * q(2), p(1)
    sys = ConstraintSystem.from_accs([(xi, pi)])
    assert not sys.linear
    assert validate_accs(sys, probe_degree=1).passed
