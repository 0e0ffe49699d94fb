"""Exact coefficients: Gaussian rationals and polynomials in hbar over them."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Rational = Fraction

__all__ = ["Rational", "GaussianRational", "Scalar", "as_gaussian", "format_rational"]


def _q(x) -> Rational:
    if isinstance(x, str):
        return Rational(Fraction(x))
    return Rational(x)


def format_rational(x) -> str:
    """Render a rational as ``n/d`` (``d`` always present)."""
    x = Rational(x)
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """An exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Rational else _q(re)
        self.im = im if type(im) is Rational else _q(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_gaussian(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        if type(other) is not GaussianRational:
            other = as_gaussian(other)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not GaussianRational:
            other = as_gaussian(other)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_gaussian(other) - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        if type(other) is not GaussianRational:
            other = as_gaussian(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._raw(a * c, b)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational._raw(self.re, -self.im)

    def __truediv__(self, other):
        other = as_gaussian(other)
        if not other:
            raise ZeroDivisionError("division by zero Gaussian rational")
        norm = other.re * other.re + other.im * other.im
        num = self * other.conjugate()
        return GaussianRational._raw(num.re / norm, num.im / norm)

    def __rtruediv__(self, other):
        return as_gaussian(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return (ONE / self) ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({format_rational(self.re)}, {format_rational(self.im)})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        return f"({self.re} + {self.im}*i)"


def as_gaussian(x) -> GaussianRational:
    if type(x) is GaussianRational:
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(x, (int, _RationalABC)) or type(x) is Rational:
        return GaussianRational(x, 0)
    if isinstance(x, complex):
        return GaussianRational(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, str):
        return GaussianRational(x, 0)
    raise TypeError(f"cannot interpret {x!r} as an exact coefficient")


ZERO = GaussianRational(0, 0)
ONE = GaussianRational(1, 0)
I = GaussianRational(0, 1)


class Scalar:
    """A finite sum ``sum_k c_k hbar^k`` with Gaussian rational ``c_k``.

    Terms with equal power are merged and zero terms are dropped, so two
    scalars are equal iff their term dictionaries are equal.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for power, c in (terms or {}).items():
            if power < 0:
                raise ValueError("negative hbar power")
            c = as_gaussian(c)
            if c:
                clean[int(power)] = clean.get(int(power), ZERO) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def constant(cls, c) -> "Scalar":
        return cls({0: c})

    @classmethod
    def hbar(cls, power: int = 1, c=1) -> "Scalar":
        return cls({power: c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.constant(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.constant(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Scalar) else -as_gaussian(other))

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.constant(other)
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, ZERO) + v1 * v2
        return Scalar(out)

    __rmul__ = __mul__

    def powers(self):
        return sorted(self.terms)

    def __repr__(self):
        inner = ", ".join(f"{k}: {v!r}" for k, v in sorted(self.terms.items()))
        return f"Scalar({{{inner}}})"
