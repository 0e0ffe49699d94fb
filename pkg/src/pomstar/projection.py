"""The projection hyper-operator and the bracket expansions built on it.

For a linear ACCS every ``Z-`` lowers the generator degree by one, so the
projection series stops at ``n = deg X``.  A nonlinear ACCS needs an explicit
truncation order and the result is only a truncation of the series.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial
from typing import Sequence

from .algebra import MIXED, OperatorPoly, parity, scommutator, ssym
from .constraints import ConstraintError, ConstraintSystem, apply_on_monomials, bracket_value
from .scalar import ONE, GaussianRational, Rational

__all__ = [
    "project",
    "series_order",
    "resolution_sum",
    "resolution_generating",
    "projector_generating",
    "expansion_term",
    "series_216",
    "series_217",
    "projected_commutator_series",
    "projected_product_series",
    "ProjectedSystem",
    "project_system",
    "HBAR_OVER_2I",
]

# hbar / (2i) = -(i/2) hbar, stored as (coefficient, hbar power)
HBAR_OVER_2I = (GaussianRational(0, Rational(-1, 2)), 1)


def _sgn(k: int) -> int:
    return -1 if k & 1 else 1


def series_order(x: OperatorPoly, sys: ConstraintSystem, order: int | None = None) -> int:
    """Highest ``n`` kept in a projection-type series applied to ``x``."""
    if sys.linear:
        top = max(x.degree(), 0)
        return top if order is None else min(order, top)
    if order is None:
        raise ConstraintError("nonlinear ACCS: a truncation order is required")
    return order


def _nested(sys: ConstraintSystem, n: int, bottom, cache_key, x: OperatorPoly) -> OperatorPoly:
    """``sum J^{a1 b1}..J^{an bn} Z+_{a1}..Z+_{an} bottom Z-_{bn}..Z-_{b1} x``."""
    if n == 0:
        return bottom(x)
    caches = sys._project_cache.setdefault(cache_key, {})
    cache = caches.setdefault(n, {})

    def one_level(mono):
        out = OperatorPoly.zero(mono.gens)
        for beta in range(2 * sys.m):
            lowered = sys.zminus(beta, mono)
            if lowered.is_zero():
                continue
            inner = _nested(sys, n - 1, bottom, cache_key, lowered)
            if inner.is_zero():
                continue
            alpha, j = sys.partner(beta)
            out = out + sys.zplus(alpha, inner).scale(j)
        return out

    return apply_on_monomials(x, cache, one_level)


def project(x: OperatorPoly, sys: ConstraintSystem, order: int | None = None, method: str = "auto") -> OperatorPoly:
    """Apply the projection hyper-operator to ``x``.

    ``method="series"`` sums the multi-index series directly.  ``"factored"``
    applies the one-pair projectors in turn; the hyper-operators of different
    pairs commute, so the product equals the full series.  ``"auto"`` picks
    ``"factored"`` for linear systems with several pairs.
    """
    if x.gens != sys.gens:
        raise ConstraintError("operator and constraint system use different generators")
    if method == "auto":
        method = "factored" if sys.linear and sys.m > 1 else "series"
    if method == "factored":
        if not sys.linear:
            raise ConstraintError("the factored projector needs a linear ACCS")
        for sub in sys.pair_systems():
            if x.is_zero():
                break
            x = _project_series(x, sub, order)
        return x
    if method != "series":
        raise ValueError(f"unknown projection method {method!r}")
    return _project_series(x, sys, order)


def _project_series(x: OperatorPoly, sys: ConstraintSystem, order: int | None) -> OperatorPoly:
    top = series_order(x, sys, order)
    key = ("P", order if not sys.linear else None)
    out = x
    for n in range(1, top + 1):
        term = _nested(sys, n, lambda y: y, key, x)
        if term.is_zero():
            continue
        c = GaussianRational(Rational(_sgn(n * sys.s), factorial(n)))
        out = out + term.scale(c)
    return out


def resolution_sum(x: OperatorPoly, sys: ConstraintSystem, order: int | None = None) -> OperatorPoly:
    """``sum (-1)^{(s+1)n}/n! J..J Z+..Z+ P Z-..Z- x``; equals ``x`` when it holds."""
    top = series_order(x, sys, order)
    key = ("R", order if not sys.linear else None)
    out = project(x, sys, order)
    for n in range(1, top + 1):
        term = _nested(sys, n, lambda y: project(y, sys, order), key, x)
        if term.is_zero():
            continue
        c = GaussianRational(Rational(_sgn((sys.s + 1) * n), factorial(n)))
        out = out + term.scale(c)
    return out


def _contraction_sign(n: int, sigma: Sequence[int], s: int) -> int:
    """Sign of letting derivative ``k`` hit auxiliary variable ``sigma[k]``.

    The word is ``(Z+_1 d_1)..(Z+_n d_n) M (phi_1 Z-_1)..(phi_n Z-_n)`` where
    ``M`` is even and every other letter has parity ``s``.  Derivatives are
    moved right one at a time, starting from the rightmost.
    """
    if not s:
        return 1
    word = []
    for k in range(n):
        word += [("zp", k), ("d", k)]
    word.append(("mid", None))
    for j in range(n):
        word += [("phi", j), ("zm", j)]
    flips = 0
    for k in reversed(range(n)):
        start = word.index(("d", k))
        stop = word.index(("phi", sigma[k]))
        flips += sum(1 for letter in word[start + 1 : stop] if letter[0] != "mid")
        del word[stop]
        del word[start]
    return -1 if flips & 1 else 1


def _generating(x, sys, c: int, d: int, middle, order=None) -> OperatorPoly:
    """``exp[c Z+_a d/dphi_a] middle exp[d J^{ab} phi_a Z-_b] x`` at ``phi = 0``.

    The auxiliary variables carry parity ``s`` so both exponents are even.
    """
    top = series_order(x, sys, order)
    out = middle(x)
    size = 2 * sys.m
    for n in range(1, top + 1):
        signs = [(sig, _contraction_sign(n, sig, sys.s)) for sig in permutations(range(n))]
        acc: dict[tuple, OperatorPoly] = {}
        for betas in product(range(size), repeat=n):
            # Z-_{b_1} ... Z-_{b_n} x : the rightmost letter acts first
            lowered = sys.zminus_chain(tuple(reversed(betas)), x)
            if lowered.is_zero():
                continue
            w = middle(lowered)
            if w.is_zero():
                continue
            gam = [sys.partner(b) for b in betas]
            for sig, sgn in signs:
                alphas = tuple(gam[sig[k]][0] for k in range(n))
                jprod = sgn
                for g in gam:
                    jprod *= g[1]
                prev = acc.get(alphas)
                term = w.scale(jprod)
                acc[alphas] = term if prev is None else prev + term
        total = OperatorPoly.zero(x.gens)
        for alphas, w in acc.items():
            total = total + sys.zplus_chain(alphas, w)
        if total.is_zero():
            continue
        coeff = GaussianRational(Rational((c * d) ** n, factorial(n) ** 2))
        out = out + total.scale(coeff)
    return out


def resolution_generating(x, sys, variant: str, order=None) -> OperatorPoly:
    """The two exponential forms of the resolution identity.

    ``variant="minus"``: ``exp[-(-1)^s Z+ d] P exp[J phi Z-]``;
    ``variant="plus"``: ``exp[(-1)^s Z+ d] P exp[-J phi Z-]``.
    """
    s1 = _sgn(sys.s)
    if variant == "minus":
        c, d = -s1, 1
    elif variant == "plus":
        c, d = s1, -1
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _generating(x, sys, c, d, lambda y: project(y, sys, order), order)


def projector_generating(x, sys, order=None) -> OperatorPoly:
    """Exponential form ``exp[(-1)^s Z+ d] exp[J phi Z-]`` of the projector."""
    return _generating(x, sys, _sgn(sys.s), 1, lambda y: y, order)


# --------------------------------------------------------------------------
# bracket expansions
# --------------------------------------------------------------------------


def _hbar_factor(n: int) -> tuple[GaussianRational, int]:
    c, h = HBAR_OVER_2I
    return c ** n * GaussianRational(Rational(1, factorial(n))), h * n


def _paired_chains(sys, n, x, y):
    """Yield ``(jprod, Z-_{an}..Z-_{a1} x, Z-_{bn}..Z-_{b1} y)`` over index tuples."""
    size = 2 * sys.m

    def rec(k, xa, yb, jprod):
        if k == n:
            yield jprod, xa, yb
            return
        for alpha in range(size):
            xa2 = sys.zminus(alpha, xa)
            if xa2.is_zero():
                continue
            beta, _ = sys.partner(alpha)
            jv = sys.jup[alpha][beta]
            yb2 = sys.zminus(beta, yb)
            if yb2.is_zero():
                continue
            yield from rec(k + 1, xa2, yb2, jprod * jv)

    yield from rec(0, x, y, 1)


def expansion_term(kind: str, n: int, x, y, sys, projected_first: bool = False, order=None):
    """``C^(n)``/``S^(n)`` (projection of the bracket) or ``C_P^(n)``/``S_P^(n)``.

    ``kind`` is ``"C"`` (graded commutator) or ``"S"`` (symmetrized product);
    ``projected_first`` selects the bracket of projections.
    """
    if kind not in ("C", "S"):
        raise ValueError(f"unknown expansion kind {kind!r}")
    if n < 0:
        raise ValueError("n must be non-negative")
    bracket = scommutator if kind == "C" else ssym
    acc = OperatorPoly.zero(x.gens)
    for jprod, xa, yb in _paired_chains(sys, n, x, y):
        if projected_first:
            term = bracket(project(xa, sys, order), project(yb, sys, order))
        else:
            term = bracket(xa, yb)
        if not term.is_zero():
            acc = acc + term.scale(jprod)
    if acc.is_zero():
        return acc
    if not projected_first:
        acc = project(acc, sys, order)
    c, h = _hbar_factor(n)
    return acc.scale(c, h)


def _parity_of(x) -> int:
    e = parity(x)
    if e == MIXED:
        raise ValueError("expansion formulas need operands of definite parity")
    return e


def _max_order(x, y, sys, order):
    if sys.linear:
        return min(max(x.degree(), 0), max(y.degree(), 0))
    if order is None:
        raise ConstraintError("nonlinear ACCS: a truncation order is required")
    return order


def _series(kind_even: str, kind_odd: str, cross: GaussianRational, x, y, sys, projected_first, order):
    s = sys.s
    ex = _parity_of(x)
    _parity_of(y)
    top = _max_order(x, y, sys, order)
    out = OperatorPoly.zero(x.gens)
    for k in range(top + 1):
        if k % 2 == 0:
            n = k // 2
            term = expansion_term(kind_even, k, x, y, sys, projected_first, order)
            out = out + term.scale(_sgn(n * s))
        else:
            n = (k - 1) // 2
            term = expansion_term(kind_odd, k, x, y, sys, projected_first, order)
            out = out + term.scale(cross * _sgn(ex * s + n * s + s))
    return out


def series_216(kind: str, x, y, sys, order=None) -> OperatorPoly:
    """Series form of ``[Px, Py}`` (``kind="commutator"``) or ``{Px, Py}``."""
    if kind == "commutator":
        return _series("C", "S", GaussianRational(2), x, y, sys, False, order)
    if kind == "symmetrized":
        return _series("S", "C", GaussianRational(Rational(1, 2)), x, y, sys, False, order)
    raise ValueError(f"unknown kind {kind!r}")


def series_217(kind: str, x, y, sys, order=None) -> OperatorPoly:
    """Series form of ``P[x, y}`` (``kind="commutator"``) or ``P{x, y}``."""
    if kind == "commutator":
        return _series("C", "S", GaussianRational(-2), x, y, sys, True, order)
    if kind == "symmetrized":
        return _series("S", "C", GaussianRational(Rational(-1, 2)), x, y, sys, True, order)
    raise ValueError(f"unknown kind {kind!r}")


def projected_commutator_series(x, y, sys, order=None) -> OperatorPoly:
    return series_216("commutator", x, y, sys, order)


def projected_product_series(kind: str, x, y, sys, order=None) -> OperatorPoly:
    return series_217(kind, x, y, sys, order)


# --------------------------------------------------------------------------
# projected system
# --------------------------------------------------------------------------


@dataclass
class ProjectedSystem:
    source: ConstraintSystem
    pairs: tuple[tuple[OperatorPoly, OperatorPoly], ...]
    hamiltonian: OperatorPoly | None = None

    def check(self) -> list[str]:
        """Violations of the projection condition and fixed-point property."""
        from .render import render

        problems = []
        for t in self.source.constraints:
            if not project(t, self.source).is_zero():
                problems.append(f"P({render(t)}) != 0")
        for pair in self.pairs:
            for g in pair:
                if project(g, self.source) != g:
                    problems.append(f"P({render(g)}) != {render(g)}")
        for i, (qa, pa) in enumerate(self.pairs):
            for j, (qb, pb) in enumerate(self.pairs):
                want = 1 if i == j else 0
                if bracket_value(qa, pb) != want:
                    problems.append(f"bracket of pair {i + 1} and {j + 1} is not canonical")
        return problems


def _reduce_independent(vectors):
    """Drop linear dependencies, keeping the earliest vectors."""
    basis = []
    rows = []  # echelon rows: list of (pivot_key, dict)
    for v in vectors:
        vec = {m: c for (m, h), c in v.terms.items()}
        for key, row in rows:
            if key in vec:
                f = vec[key] / row[key]
                for k, val in row.items():
                    nv = vec.get(k, GaussianRational()) - f * val
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
        if vec:
            key = min(vec)
            rows.append((key, vec))
            basis.append(v)
    return basis


def _canonical_pairs(vectors, s: int):
    """Symplectic Gram-Schmidt for linear operators of a single parity ``s``."""
    c21 = -1 if s == 0 else 1
    rest = list(vectors)
    pairs = []
    while rest:
        k = None
        u = None
        for i, cand in enumerate(rest):
            if s and bracket_value(cand, cand):
                continue
            k = next((j for j in range(len(rest)) if j != i and bracket_value(cand, rest[j])), None)
            if k is not None:
                u = i
                break
        if k is None:
            raise ConstraintError("could not complete a canonical basis of the reduced phase space")
        uu, v = rest[u], rest[k]
        buv = bracket_value(uu, v)
        qv = bracket_value(v, v) if s else GaussianRational()
        xi = uu
        pi = (v - uu.scale(qv / (buv * 2))).scale(ONE / buv)
        pairs.append((xi, pi))
        new = []
        for j, w in enumerate(rest):
            if j in (u, k):
                continue
            w2 = w + xi.scale(-bracket_value(pi, w) / c21) + pi.scale(-bracket_value(xi, w))
            if not w2.is_zero():
                new.append(w2)
        rest = new
    return pairs


def project_system(sys: ConstraintSystem, hamiltonian: OperatorPoly | None = None, pairs=None) -> ProjectedSystem:
    """Build the reduced canonical set; nonlinear systems must declare ``pairs``."""
    ham = project(hamiltonian, sys) if hamiltonian is not None and sys.linear else None
    if pairs is not None:
        return ProjectedSystem(sys, tuple(pairs), ham)
    if not sys.linear:
        raise ConstraintError("nonlinear ACCS: declare the reduced canonical pairs explicitly")
    gens = sys.gens
    images = []
    for slot in range(2 * gens.n):
        exps = [0] * (2 * gens.n)
        exps[slot] = 1
        img = project(OperatorPoly.monomial(gens, exps), sys)
        if not img.is_zero():
            images.append(img)
    images = _reduce_independent(images)
    out = []
    for e in (0, 1):
        group = [v for v in images if parity(v) == e]
        if group:
            out.extend(_canonical_pairs(group, e))
    if len(out) != gens.n - sys.m:  # pragma: no cover - linear algebra guarantees it
        raise ConstraintError("reduced phase space has unexpected dimension")
    return ProjectedSystem(sys, tuple(out), ham)
