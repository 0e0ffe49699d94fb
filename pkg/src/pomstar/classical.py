"""Commutative phase-space symbols, the Moyal product and the Weyl map.

Symbols use the same ``(exponents, hbar_power)`` keys as operators, but the
product is (super)commutative.  The Moyal product is restricted to even
generators; the Weyl map handles odd pairs as well.
"""

from __future__ import annotations

from math import comb, factorial

from .algebra import GeneratorSet, OperatorPoly, _merge_sign, mul
from .constraints import ConstraintError
from .scalar import ONE, ZERO, GaussianRational, Rational, as_gaussian

__all__ = [
    "ClassicalSymbol",
    "moyal",
    "poisson",
    "dirac_bracket",
    "weyl_order",
    "weyl_symbol",
]


class ClassicalSymbol:
    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms=None, *, _clean=False):
        self.gens = gens
        if _clean:
            self.terms = terms
        else:
            acc = {}
            for (m, h), c in (terms or {}).items():
                m = tuple(m)
                if any(m[k] > 1 for k in gens.odd_slots):
                    continue
                acc[(m, h)] = acc.get((m, h), ZERO) + as_gaussian(c)
            self.terms = {k: v for k, v in acc.items() if v}

    @classmethod
    def variable(cls, gens, slot: int):
        exps = [0] * (2 * gens.n)
        exps[slot] = 1
        return cls(gens, {(tuple(exps), 0): ONE}, _clean=True)

    @classmethod
    def constant(cls, gens, c=1, hbar_power: int = 0):
        return cls(gens, {((0,) * (2 * gens.n), hbar_power): c})

    @classmethod
    def from_operator(cls, op: OperatorPoly) -> "ClassicalSymbol":
        """Read a normal-ordered operator's coefficients as a commutative polynomial."""
        return cls(op.gens, dict(op.terms), _clean=True)

    def __eq__(self, other):
        return isinstance(other, ClassicalSymbol) and self.gens == other.gens and self.terms == other.terms

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return ClassicalSymbol(self.gens, {k: v for k, v in out.items() if v}, _clean=True)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c, hbar_power: int = 0):
        c = as_gaussian(c)
        if not c:
            return ClassicalSymbol(self.gens, {}, _clean=True)
        return ClassicalSymbol(
            self.gens, {(m, h + hbar_power): v * c for (m, h), v in self.terms.items()}, _clean=True
        )

    def __mul__(self, other):
        if not isinstance(other, ClassicalSymbol):
            return self.scale(other)
        par = self.gens.parities
        out: dict = {}
        for (m1, h1), c1 in self.terms.items():
            for (m2, h2), c2 in other.terms.items():
                sign = _merge_sign(par, m1, m2)
                if not sign:
                    continue
                key = (tuple(a + b for a, b in zip(m1, m2)), h1 + h2)
                v = c1 * c2 * sign
                out[key] = out.get(key, ZERO) + v
        return ClassicalSymbol(self.gens, {k: v for k, v in out.items() if v}, _clean=True)

    __rmul__ = scale

    def derivative(self, slot: int) -> "ClassicalSymbol":
        """Partial derivative in one even variable."""
        if self.gens.slot_parity(slot):
            raise ValueError("derivatives are only provided for even variables")
        out = {}
        for (m, h), c in self.terms.items():
            e = m[slot]
            if e:
                m2 = m[:slot] + (e - 1,) + m[slot + 1 :]
                out[(m2, h)] = c * e
        return ClassicalSymbol(self.gens, out, _clean=True)

    def degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=-1)

    def hbar_coeffs(self):
        groups: dict = {}
        for (m, h), c in self.terms.items():
            groups.setdefault(h, {})[(m, 0)] = c
        return [(h, ClassicalSymbol(self.gens, groups[h], _clean=True)) for h in sorted(groups)]

    def to_operator_naive(self) -> OperatorPoly:
        """Same coefficients read as a normal-ordered operator (standard ordering)."""
        return OperatorPoly(self.gens, dict(self.terms), _clean=True)

    def __repr__(self):
        from .render import render

        return f"ClassicalSymbol({render(self.to_operator_naive())!r})"


def _require_even(gens):
    if any(gens.parities):
        raise ValueError("the Moyal product is implemented for even generators only")


def _pair_derivative(pairs: dict, gens, fslot: int, gslot: int, sign: int) -> dict:
    """Apply ``sign * d/dz_fslot (x) d/dz_gslot`` to a dict of symbol pairs."""
    out: dict = {}
    for (mf, mg), c in pairs.items():
        ef, eg = mf[fslot], mg[gslot]
        if not ef or not eg:
            continue
        mf2 = mf[:fslot] + (ef - 1,) + mf[fslot + 1 :]
        mg2 = mg[:gslot] + (eg - 1,) + mg[gslot + 1 :]
        key = (mf2, mg2)
        out[key] = out.get(key, ZERO) + c * (ef * eg * sign)
    return {k: v for k, v in out.items() if v}


def moyal(f: ClassicalSymbol, g: ClassicalSymbol) -> ClassicalSymbol:
    """``f exp((i hbar / 2) theta^{mu nu} <-d_mu d_nu->) g`` for polynomial symbols."""
    gens = f.gens
    _require_even(gens)
    n = gens.n
    # state: {(f exponents + (hbar power,), g exponents): coeff}
    cur: dict = {}
    for (mf, hf), cf in f.terms.items():
        for (mg, hg), cg in g.terms.items():
            key = (mf + (hf + hg,), mg)
            cur[key] = cur.get(key, ZERO) + cf * cg
    out = ClassicalSymbol(gens, {}, _clean=True)
    half_i = GaussianRational(0, Rational(1, 2))
    k = 0
    while cur:
        coeff = half_i ** k * GaussianRational(Rational(1, factorial(k)))
        acc: dict = {}
        for (mf_h, mg), c in cur.items():
            mf, h = mf_h[:-1], mf_h[-1]
            m = tuple(a + b for a, b in zip(mf, mg))
            key = (m, h + k)
            acc[key] = acc.get(key, ZERO) + c * coeff
        out = out + ClassicalSymbol(gens, {kk: v for kk, v in acc.items() if v}, _clean=True)
        # one more factor of theta^{mu nu} d_mu (x) d_nu
        nxt: dict = {}
        for i in range(n):
            for fslot, gslot, sign in ((i, n + i, 1), (n + i, i, -1)):
                part = _pair_derivative(cur, gens, fslot, gslot, sign)
                for key, v in part.items():
                    nxt[key] = nxt.get(key, ZERO) + v
        cur = {kk: v for kk, v in nxt.items() if v}
        k += 1
    return out


def poisson(f: ClassicalSymbol, g: ClassicalSymbol) -> ClassicalSymbol:
    """``sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i`` (even generators)."""
    _require_even(f.gens)
    n = f.gens.n
    out = ClassicalSymbol(f.gens, {}, _clean=True)
    for i in range(n):
        out = out + f.derivative(i) * g.derivative(n + i) - f.derivative(n + i) * g.derivative(i)
    return out


def _solve_inverse(mat):
    """Inverse of a square Gaussian-rational matrix by Gauss-Jordan."""
    n = len(mat)
    a = [[as_gaussian(v) for v in row] + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ConstraintError("constraint bracket matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = ONE / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [a[r][k] - f * a[col][k] for k in range(2 * n)]
    return [row[n:] for row in a]


def dirac_bracket(f: ClassicalSymbol, g: ClassicalSymbol, constraints) -> ClassicalSymbol:
    """``{f,g} - {f,T_a} C^{ab} {T_b,g}`` with ``C`` the inverse of ``{T_a, T_b}``.

    The constraint bracket matrix must be constant (linear constraints).
    """
    ts = list(constraints)
    table = []
    for ta in ts:
        row = []
        for tb in ts:
            v = poisson(ta, tb)
            if v.degree() > 0:
                raise ConstraintError("constraint brackets are not constant")
            row.append(v.terms.get(((0,) * (2 * f.gens.n), 0), ZERO))
        table.append(row)
    inv = _solve_inverse(table)
    out = poisson(f, g)
    left = [poisson(f, t) for t in ts]
    right = [poisson(t, g) for t in ts]
    for a in range(len(ts)):
        for b in range(len(ts)):
            if inv[a][b]:
                out = out - (left[a] * right[b]).scale(inv[a][b])
    return out


# --------------------------------------------------------------------------
# Weyl map
# --------------------------------------------------------------------------


def _weyl_pair(gens, i: int, a: int, b: int) -> OperatorPoly:
    """Weyl-ordered ``x_i^a p_i^b`` written in normal order."""
    n = gens.n
    size = 2 * n
    terms = {}
    if gens.parities[i]:
        exps = [0] * size
        exps[i], exps[n + i] = a, b
        terms[(tuple(exps), 0)] = ONE
        if a and b:
            terms[((0,) * size, 1)] = GaussianRational(0, Rational(-1, 2))
        return OperatorPoly(gens, terms)
    minus_half_i = GaussianRational(0, Rational(-1, 2))
    for k in range(min(a, b) + 1):
        exps = [0] * size
        exps[i], exps[n + i] = a - k, b - k
        terms[(tuple(exps), k)] = minus_half_i ** k * GaussianRational(comb(a, k) * comb(b, k) * factorial(k))
    return OperatorPoly(gens, terms)


def _weyl_monomial(gens, m) -> OperatorPoly:
    n = gens.n
    par = gens.parities
    flips = 0
    for j in range(n):
        if par[j] and m[j]:
            for i in range(j):
                if par[i] and m[n + i]:
                    flips += 1
    out = OperatorPoly.one(gens)
    for i in range(n):
        if m[i] or m[n + i]:
            out = mul(out, _weyl_pair(gens, i, m[i], m[n + i]))
    return out.scale(-1 if flips & 1 else 1)


_WEYL_CACHE: dict = {}


def weyl_order(sym: ClassicalSymbol) -> OperatorPoly:
    """The operator whose Weyl symbol is ``sym``."""
    gens = sym.gens
    out = OperatorPoly.zero(gens)
    for (m, h), c in sym.terms.items():
        key = (gens, m)
        w = _WEYL_CACHE.get(key)
        if w is None:
            w = _weyl_monomial(gens, m)
            _WEYL_CACHE[key] = w
        out = out + w.scale(c, h)
    return out


def weyl_symbol(op: OperatorPoly) -> ClassicalSymbol:
    """Inverse of :func:`weyl_order` by elimination from the top degree down."""
    gens = op.gens
    rem = op
    found: dict = {}
    while not rem.is_zero():
        (m, h), c = max(rem.terms.items(), key=lambda kv: (sum(kv[0][0]), kv[0][0], -kv[0][1]))
        found[(m, h)] = found.get((m, h), ZERO) + c
        rem = rem - weyl_order(ClassicalSymbol(gens, {(m, h): c}, _clean=True))
    return ClassicalSymbol(gens, found)
