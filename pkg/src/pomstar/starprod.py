"""Two-copy representation, constraint star products and hbar series.

A :class:`DoubledOperator` is a sum of ordered pairs ``L (x) R``.  Each pair
also records which copy its left factor belongs to: orientation ``0`` means
``L(eta) R(zeta)`` and orientation ``1`` means ``L(zeta) R(eta)``.  Merging
(identifying the copies) always multiplies ``L`` on the left of ``R``.  A
copy-``zeta`` hyper-operator acting on the right factor picks up the graded
sign for passing the left factor, and vice versa.
"""

from __future__ import annotations

from math import factorial

from .algebra import MIXED, OperatorPoly, hbar_coeffs, mul, parity, scommutator, ssym
from .algebra import _mono_parity
from .constraints import ConstraintError, ConstraintSystem
from .projection import HBAR_OVER_2I, project
from .scalar import ONE, GaussianRational, Rational

__all__ = [
    "DoubledOperator",
    "embed",
    "apply_theta",
    "exp_theta",
    "project_factors",
    "merge",
    "star",
    "pstar",
    "star_commutator",
    "star_symprod",
    "doubled_bracket",
    "hbar_series_of",
    "grade",
]


class DoubledOperator:
    """Element of the two-copy algebra: ``{(orient, L, R, hbar): coeff}``."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens, terms=None):
        self.gens = gens
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, DoubledOperator) and self.gens == other.gens and self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            prev = out.get(k)
            out[k] = v if prev is None else prev + v
        return DoubledOperator(self.gens, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c, hbar_power: int = 0):
        c = GaussianRational(c) if not isinstance(c, GaussianRational) else c
        if not c:
            return DoubledOperator(self.gens)
        return DoubledOperator(
            self.gens, {(o, l, r, h + hbar_power): v * c for (o, l, r, h), v in self.terms.items()}
        )

    def pairs(self):
        """``[(orient, L, R)]`` with the weights folded into ``L``."""
        out = []
        for (o, l, r, h), v in self.terms.items():
            out.append(
                (
                    o,
                    OperatorPoly(self.gens, {(l, h): v}, _clean=True),
                    OperatorPoly(self.gens, {(r, 0): ONE}, _clean=True),
                )
            )
        return out

    def __repr__(self):
        from .render import render

        parts = []
        for (o, l, r, h), v in self.terms.items():
            lo = render(OperatorPoly(self.gens, {(l, h): v}, _clean=True))
            ro = render(OperatorPoly(self.gens, {(r, 0): ONE}, _clean=True))
            tags = ("eta", "zeta") if o == 0 else ("zeta", "eta")
            parts.append(f"({lo})[{tags[0]}] (x) ({ro})[{tags[1]}]")
        return "DoubledOperator(" + " + ".join(parts) + ")" if parts else "DoubledOperator(0)"


def _outer(gens, orient, left: OperatorPoly, right: OperatorPoly, c=ONE, out=None):
    out = {} if out is None else out
    for (l, h1), v1 in left.terms.items():
        for (r, h2), v2 in right.terms.items():
            key = (orient, l, r, h1 + h2)
            v = v1 * v2 * c
            prev = out.get(key)
            out[key] = v if prev is None else prev + v
    return out


def embed(x: OperatorPoly, y: OperatorPoly, orient: int = 0) -> DoubledOperator:
    """``x(eta) y(zeta)`` (or ``x(zeta) y(eta)`` for ``orient=1``)."""
    if x.gens != y.gens:
        raise ValueError("operators live over different generator sets")
    return DoubledOperator(x.gens, _outer(x.gens, orient, x, y))


def apply_theta(d: DoubledOperator, sys: ConstraintSystem) -> DoubledOperator:
    """Apply ``Theta = Z-_a(eta) J^{ab} Z-_b(zeta)``; the zeta factor acts first."""
    gens = d.gens
    s = sys.s
    par = gens.parities
    out: dict = {}
    for (o, l, r, h), v in d.terms.items():
        lpoly = OperatorPoly(gens, {(l, h): v}, _clean=True)
        rpoly = OperatorPoly(gens, {(r, 0): ONE}, _clean=True)
        el = _mono_parity(par, l)
        for a in range(2 * sys.m):
            b, _ = sys.partner(a)
            j = sys.jup[a][b]
            if o == 0:
                # Z-_b(zeta) passes L(eta), then Z-_a(eta) hits L
                new_r = sys.zminus(b, rpoly)
                if new_r.is_zero():
                    continue
                new_l = sys.zminus(a, lpoly)
                sign = -1 if (s and el) else 1
            else:
                # Z-_b(zeta) hits L directly, Z-_a(eta) passes the new L
                new_l = sys.zminus(b, lpoly)
                if new_l.is_zero():
                    continue
                new_r = sys.zminus(a, rpoly)
                sign = -1 if (s and (el + s) & 1) else 1
            if new_l.is_zero() or new_r.is_zero():
                continue
            _outer(gens, o, new_l, new_r, GaussianRational(j * sign), out)
    return DoubledOperator(gens, out)


def exp_theta(
    d: DoubledOperator, sys: ConstraintSystem, sign: int = 1, parts: str = "all", order: int | None = None
) -> DoubledOperator:
    """``exp(sign * (hbar/2i) Theta) d``; ``parts`` picks ``"even"`` (cosh) or ``"odd"`` (sinh)."""
    if not sys.linear and order is None:
        raise ConstraintError("nonlinear ACCS: a truncation order is required")
    c, h = HBAR_OVER_2I
    total = DoubledOperator(d.gens)
    cur = d
    k = 0
    while not cur.is_zero():
        if order is not None and k > order:
            break
        if parts == "all" or (parts == "even") == (k % 2 == 0):
            coeff = (c * sign) ** k * GaussianRational(Rational(1, factorial(k)))
            total = total + cur.scale(coeff, h * k)
        cur = apply_theta(cur, sys)
        k += 1
    return total


def project_factors(d: DoubledOperator, sys: ConstraintSystem, order: int | None = None) -> DoubledOperator:
    """``P(eta) P(zeta)`` acting factorwise (P is even so no signs arise)."""
    out: dict = {}
    for o, lpoly, rpoly in d.pairs():
        pl = project(lpoly, sys, order)
        if pl.is_zero():
            continue
        pr = project(rpoly, sys, order)
        if pr.is_zero():
            continue
        _outer(d.gens, o, pl, pr, ONE, out)
    return DoubledOperator(d.gens, out)


def merge(d: DoubledOperator) -> OperatorPoly:
    """Identify the copies: each pair becomes the product ``L * R``."""
    out = OperatorPoly.zero(d.gens)
    for _, lpoly, rpoly in d.pairs():
        out = out + mul(lpoly, rpoly)
    return out


def star(x, y, sys, order=None) -> OperatorPoly:
    """Constraint star product ``merge(exp((hbar/2i) Theta) x(eta) y(zeta))``."""
    return merge(exp_theta(embed(x, y), sys, order=order))


def pstar(x, y, sys, order=None, project_first: bool = False) -> OperatorPoly:
    """Projected star product; by default the exponential acts before ``P(eta)P(zeta)``."""
    d = embed(x, y)
    if project_first:
        return merge(exp_theta(project_factors(d, sys, order), sys, order=order))
    return merge(project_factors(exp_theta(d, sys, order=order), sys, order))


def _graded_pair(prod, x, y, sym: bool):
    out = OperatorPoly.zero(x.gens)
    for ex, xa in x.homogeneous_parts().items():
        for ey, yb in y.homogeneous_parts().items():
            sign = -1 if ex & ey else 1
            a = prod(xa, yb)
            b = prod(yb, xa).scale(sign)
            out = out + (a + b if sym else a - b)
    return out.scale(GaussianRational(Rational(1, 2))) if sym else out


def _product(kind: str, sys, order):
    if kind in ("star", "*"):
        return lambda a, b: star(a, b, sys, order)
    if kind in ("pstar", "P*"):
        return lambda a, b: pstar(a, b, sys, order)
    raise ValueError(f"unknown product {kind!r}")


def star_commutator(kind: str, x, y, sys, order=None) -> OperatorPoly:
    """``x * y - (-1)^(e_x e_y) y * x`` for ``kind`` in ``star``/``pstar``."""
    return _graded_pair(_product(kind, sys, order), x, y, sym=False)


def star_symprod(kind: str, x, y, sys, order=None) -> OperatorPoly:
    return _graded_pair(_product(kind, sys, order), x, y, sym=True)


def doubled_bracket(x, y, sym: bool) -> DoubledOperator:
    """``[x(eta), y(zeta)}`` or ``{x(eta), y(zeta)}`` in the two-copy algebra.

    The second word ``y(zeta) x(eta)`` keeps ``y`` on the left, so after
    merging it becomes the product ``y x``.
    """
    ex, ey = parity(x), parity(y)
    if MIXED in (ex, ey):
        raise ValueError("doubled brackets need operands of definite parity")
    sign = -1 if ex & ey else 1
    first = embed(x, y, 0)
    second = embed(y, x, 1).scale(sign)
    if sym:
        return (first + second).scale(GaussianRational(Rational(1, 2)))
    return first - second


def hbar_series_of(kind: str, x, y, sys, basis: str = "normal", order=None):
    """hbar grading of ``[Px, Py}`` (``"commutator"``) or ``P{x, y}`` (``"symmetrized"``).

    ``basis="normal"`` grades the normal-ordered coefficients;
    ``basis="weyl"`` grades the Weyl-symbol coefficients and returns the
    Weyl-ordered operator of each coefficient.  Either way
    ``sum(hbar**n * part)`` is the exact operator.
    """
    if kind == "commutator":
        value = scommutator(project(x, sys, order), project(y, sys, order))
    elif kind == "symmetrized":
        value = project(ssym(x, y), sys, order)
    else:
        raise ValueError(f"unknown series kind {kind!r}")
    return grade(value, basis)


def grade(value: OperatorPoly, basis: str = "normal"):
    if basis == "normal":
        return hbar_coeffs(value)
    if basis == "weyl":
        from .classical import weyl_order, weyl_symbol

        sym = weyl_symbol(value)
        out = []
        for h, part in sym.hbar_coeffs():
            out.append((h, weyl_order(part)))
        return out
    raise ValueError(f"unknown basis {basis!r}")
