"""Second-class constraint systems and their canonically conjugate sets.

Index convention for the symplectic vector: ``Z[a] = xi^a`` and
``Z[a + M] = pi_a`` for ``a = 0..M-1`` (zero based in code).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import MIXED, AlgebraError, GeneratorSet, OperatorPoly, parity, scommutator, ssym
from .hyperops import apply_minus
from .scalar import ONE, ZERO, GaussianRational, as_gaussian

__all__ = [
    "ConstraintError",
    "ConstraintSystem",
    "CheckResult",
    "ValidationReport",
    "build_accs_linear",
    "symplectic_vector",
    "j_matrices",
    "validate_accs",
    "bracket_value",
    "is_linear",
]


class ConstraintError(ValueError):
    """Invalid, degenerate or unsupported constraint input."""


def j_matrices(m: int, s: int) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """Exact ``(J^{ab}, J_{ab})`` for ``M`` pairs of parity ``s``."""
    if m < 1:
        raise ConstraintError("M must be at least 1")
    if s not in (0, 1):
        raise ConstraintError("parity must be 0 or 1")
    c = -1 if s == 0 else 1  # -(-1)^s
    size = 2 * m
    up = [[0] * size for _ in range(size)]
    low = [[0] * size for _ in range(size)]
    for a in range(m):
        up[a][a + m] = 1
        up[a + m][a] = c
        low[a][a + m] = c
        low[a + m][a] = 1
    return tuple(map(tuple, up)), tuple(map(tuple, low))


def matmul_int(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def is_linear(x: OperatorPoly) -> bool:
    """Homogeneous of degree one in the generators with hbar-free coefficients."""
    return bool(x.terms) and all(sum(m) == 1 and h == 0 for m, h in x.terms)


def bracket_value(a: OperatorPoly, b: OperatorPoly):
    """``[a, b} / (i hbar)`` as a Gaussian rational, or ``None`` if not constant."""
    v = scommutator(a, b)
    if v.is_zero():
        return ZERO
    try:
        v = v.divide_by_ihbar()
    except AlgebraError:
        return None
    if not v.is_scalar() or not v.hbar_free():
        return None
    return v.scalar_value().terms.get(0, ZERO)


@dataclass
class ConstraintSystem:
    """Constraints, their ACCS pairs ``(xi^a, pi_a)`` and the matrices J."""

    gens: GeneratorSet
    s: int
    accs: tuple[tuple[OperatorPoly, OperatorPoly], ...]
    constraints: tuple[OperatorPoly, ...] = ()
    linear: bool = True
    jup: tuple = field(init=False)
    jlow: tuple = field(init=False)

    def __post_init__(self):
        self.accs = tuple((xi, pi) for xi, pi in self.accs)
        if not self.accs:
            raise ConstraintError("at least one ACCS pair is required")
        if not self.constraints:
            self.constraints = tuple(symplectic_vector_from(self.accs))
        self.jup, self.jlow = j_matrices(len(self.accs), self.s)
        self._z = tuple(symplectic_vector_from(self.accs))
        self.linear = all(is_linear(z) for z in self._z)
        # per-monomial caches for the single-index hyper-operators
        self._plus_cache = [dict() for _ in range(2 * self.m)]
        self._minus_cache = [dict() for _ in range(2 * self.m)]
        self._project_cache: dict = {}
        self._pairs = None

    @classmethod
    def from_accs(cls, pairs, constraints=(), s=None) -> "ConstraintSystem":
        pairs = tuple(pairs)
        if not pairs:
            raise ConstraintError("at least one ACCS pair is required")
        gens = pairs[0][0].gens
        pars = {parity(x) for pair in pairs for x in pair}
        if MIXED in pars or len(pars) != 1:
            raise ConstraintError("ACCS elements must share one definite parity")
        found = pars.pop()
        if s is not None and s != found:
            raise ConstraintError(f"ACCS parity is {found}, expected {s}")
        return cls(gens=gens, s=found, accs=pairs, constraints=tuple(constraints))

    @property
    def m(self) -> int:
        return len(self.accs)

    @property
    def n(self) -> int:
        return self.gens.n

    @property
    def z(self) -> tuple[OperatorPoly, ...]:
        return self._z

    def partner(self, beta: int) -> tuple[int, int]:
        """The unique ``alpha`` with ``J^{alpha beta} != 0`` and its value."""
        m = self.m
        alpha = beta + m if beta < m else beta - m
        return alpha, self.jup[alpha][beta]

    # single-index hyper-operators with per-monomial caching ----------------
    def _apply_cached(self, cache, fn, x: OperatorPoly) -> OperatorPoly:
        return apply_on_monomials(x, cache, fn)

    def zplus(self, alpha: int, x: OperatorPoly) -> OperatorPoly:
        za = self._z[alpha]
        return self._apply_cached(self._plus_cache[alpha], lambda o: ssym(za, o), x)

    def zminus(self, alpha: int, x: OperatorPoly) -> OperatorPoly:
        za = self._z[alpha]
        return self._apply_cached(self._minus_cache[alpha], lambda o: apply_minus(za, o), x)

    def zminus_chain(self, alphas: Sequence[int], x: OperatorPoly) -> OperatorPoly:
        """``Z-_{a_n} ... Z-_{a_1} x`` for ``alphas = (a_1, ..., a_n)``."""
        for a in alphas:
            if x.is_zero():
                break
            x = self.zminus(a, x)
        return x

    def zplus_chain(self, alphas: Sequence[int], x: OperatorPoly) -> OperatorPoly:
        """``Z+_{a_1} ... Z+_{a_n} x`` (rightmost acts first)."""
        for a in reversed(alphas):
            if x.is_zero():
                break
            x = self.zplus(a, x)
        return x

    def pair_systems(self) -> tuple["ConstraintSystem", ...]:
        """One single-pair system per ACCS pair (cached)."""
        if self._pairs is None:
            if self.m == 1:
                self._pairs = (self,)
            else:
                self._pairs = tuple(ConstraintSystem(gens=self.gens, s=self.s, accs=(pair,)) for pair in self.accs)
        return self._pairs

    def describe(self) -> dict:
        from .render import render

        return {
            "pairs": self.n,
            "odd_pairs": [i + 1 for i, p in enumerate(self.gens.parities) if p],
            "accs_parity": self.s,
            "accs": [[render(xi), render(pi)] for xi, pi in self.accs],
            "linear": self.linear,
        }


def apply_on_monomials(x: OperatorPoly, cache: dict, fn) -> OperatorPoly:
    """Apply a linear map given on unit monomials, memoizing each image in ``cache``.

    ``fn`` must commute with multiplication by ``hbar`` and by scalars.
    """
    out: dict = {}
    get = out.get
    for (mono, h), c in x.terms.items():
        img = cache.get(mono)
        if img is None:
            img = fn(OperatorPoly(x.gens, {(mono, 0): ONE}, _clean=True))
            cache[mono] = img
        for (m2, h2), c2 in img.terms.items():
            key = (m2, h + h2)
            v = c * c2
            prev = get(key)
            out[key] = v if prev is None else prev + v
    return OperatorPoly(x.gens, {k: v for k, v in out.items() if v}, _clean=True)


def symplectic_vector_from(accs):
    xis = [xi for xi, _ in accs]
    pis = [pi for _, pi in accs]
    return xis + pis


def symplectic_vector(sys: ConstraintSystem) -> list[OperatorPoly]:
    return list(sys.z)


# --------------------------------------------------------------------------
# linear ACCS construction
# --------------------------------------------------------------------------


def _det(mat):
    """Exact determinant by Gaussian elimination over Gaussian rationals."""
    a = [[as_gaussian(v) for v in row] for row in mat]
    n = len(a)
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return ZERO
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        inv = ONE / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                a[r] = [a[r][k] - f * a[col][k] for k in range(n)]
    return det


def build_accs_linear(constraints: Sequence[OperatorPoly], n: int | None = None) -> ConstraintSystem:
    """Symplectic Gram-Schmidt on linear second-class constraints.

    The pivot is the first remaining constraint; its partner is the first
    later constraint with a nonvanishing bracket.  The returned ACCS spans the
    same linear space as the input and satisfies ``[Z_a, Z_b} = i hbar J^{ab}``.
    """
    ts = list(constraints)
    if not ts:
        raise ConstraintError("no constraints given")
    gens = ts[0].gens
    if n is not None and gens.n != n:
        raise ConstraintError(f"constraints are over {gens.n} pairs, expected {n}")
    if any(t.gens != gens for t in ts):
        raise ConstraintError("constraints live over different generator sets")
    for t in ts:
        if not is_linear(t):
            raise ConstraintError("nonlinear constraint: supply the ACCS pairs explicitly")
    pars = {parity(t) for t in ts}
    if MIXED in pars or len(pars) != 1:
        raise ConstraintError("mixed-parity constraint sets are not supported")
    s = pars.pop()
    if len(ts) % 2:
        raise ConstraintError("second-class constraints come in an even number")
    if len(ts) >= 2 * gens.n:
        raise ConstraintError("need 2M < 2N constraints")

    table = [[bracket_value(a, b) for b in ts] for a in ts]
    if _det(table) == ZERO:
        raise ConstraintError("degenerate bracket matrix: constraints are first-class or redundant")

    c21 = -1 if s == 0 else 1  # J^{21} = -(-1)^s
    rest = list(ts)
    pairs = []
    while rest:
        u = rest[0]
        if s and bracket_value(u, u):
            raise ConstraintError("odd pivot is not isotropic; supply the ACCS pairs explicitly")
        k = next((j for j in range(1, len(rest)) if bracket_value(u, rest[j])), None)
        if k is None:
            raise ConstraintError("degenerate bracket matrix: constraints are first-class or redundant")
        v = rest[k]
        buv = bracket_value(u, v)
        qv = bracket_value(v, v) if s else ZERO
        xi = u
        pi = (v - u.scale(qv / (buv * 2))).scale(ONE / buv)
        pairs.append((xi, pi))
        remaining = []
        for j, w in enumerate(rest):
            if j in (0, k):
                continue
            beta = -bracket_value(xi, w)
            alpha = -bracket_value(pi, w) / c21
            w2 = w + xi.scale(alpha) + pi.scale(beta)
            if w2.is_zero():
                raise ConstraintError("redundant constraints")
            remaining.append(w2)
        rest = remaining

    sys = ConstraintSystem(gens=gens, s=s, accs=tuple(pairs), constraints=tuple(ts))
    report = validate_accs(sys, probe_degree=0)
    if not report.passed:  # pragma: no cover - construction guarantees it
        raise ConstraintError(f"internal error, ACCS failed validation: {report.first_failure}")
    return sys


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)


def validate_accs(sys: ConstraintSystem, probe_degree: int = 3) -> ValidationReport:
    """Check the canonical brackets, J inversion and the hyper-commutators."""
    from .render import render

    checks = []
    z = sys.z
    size = 2 * sys.m

    bad = [render(x) for x in z if parity(x) != sys.s]
    checks.append(CheckResult("parity", not bad, f"elements without parity {sys.s}: {bad}" if bad else ""))
    checks.append(
        CheckResult("size", size < 2 * sys.n, "" if size < 2 * sys.n else "need 2M < 2N")
    )

    detail = ""
    for a in range(size):
        for b in range(size):
            lhs = scommutator(z[a], z[b])
            rhs = OperatorPoly.constant(sys.gens, GaussianRational(0, sys.jup[a][b]), 1)
            if lhs != rhs:
                detail = f"[Z{a + 1}, Z{b + 1}] = {render(lhs)}, expected {render(rhs)}"
                break
        if detail:
            break
    checks.append(CheckResult("canonical_brackets", not detail, detail))

    ident = tuple(tuple(int(i == j) for j in range(size)) for i in range(size))
    ok = matmul_int(sys.jup, sys.jlow) == ident and matmul_int(sys.jlow, sys.jup) == ident
    checks.append(CheckResult("j_inverse", ok, "" if ok else "J^{ab} J_{bc} != delta"))

    if probe_degree > 0 and checks[2].passed:
        detail = hyper_relations_counterexample(sys, sys.gens.monomials(probe_degree))
        checks.append(CheckResult("hyper_relations", not detail, detail))
    return ValidationReport(checks)


def hyper_relations_counterexample(sys: ConstraintSystem, probes) -> str:
    """First violation of the graded hyper-commutators of ``Z+-``, or ''."""
    from .render import render

    size = 2 * sys.m
    sign = -1 if sys.s else 1  # -(-1)^{s s} pattern: (-1)^{s*s} = (-1)^s
    ops = {"+": sys.zplus, "-": sys.zminus}
    for mono in probes:
        o = OperatorPoly.monomial(sys.gens, mono)
        for a in range(size):
            for b in range(size):
                for ka, kb in (("+", "+"), ("-", "-"), ("+", "-"), ("-", "+")):
                    fa, fb = ops[ka], ops[kb]
                    lhs = fa(a, fb(b, o)) - fb(b, fa(a, o)).scale(sign)
                    rhs = o.scale(sys.jup[a][b]) if ka != kb else OperatorPoly.zero(sys.gens)
                    if lhs != rhs:
                        return (
                            f"[Z{ka}_{a + 1}, Z{kb}_{b + 1}] on {render(o)}: "
                            f"{render(lhs)} != {render(rhs)}"
                        )
    return ""
