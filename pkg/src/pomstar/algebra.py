"""Normal-ordered superpolynomials in canonical generators.

An operator is stored as a dictionary mapping ``(exponents, hbar_power)`` to a
Gaussian rational.  ``exponents`` has length ``2N``: slots ``0..N-1`` hold the
positions ``q^1..q^N`` (or ``th^i`` for odd pairs) and slots ``N..2N-1`` the
momenta.  The stored word is always read in that slot order, which is the
normal form: every position sits left of every momentum, indices ascend.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Iterable, Iterator

from .scalar import ONE, ZERO, GaussianRational, Scalar, as_gaussian

__all__ = [
    "GeneratorSet",
    "Generator",
    "OperatorPoly",
    "MIXED",
    "AlgebraError",
    "HbarDivisionError",
    "mul",
    "scommutator",
    "ssym",
    "parity",
    "hbar_coeffs",
]

MIXED = "mixed"

_IPOW = (
    GaussianRational(1, 0),
    GaussianRational(0, 1),
    GaussianRational(-1, 0),
    GaussianRational(0, -1),
)


class AlgebraError(ValueError):
    pass


class HbarDivisionError(AlgebraError):
    """Raised when a bracket that should carry a factor of i*hbar does not."""


@dataclass(frozen=True)
class GeneratorSet:
    """Parities of the ``N`` canonical pairs; a pair shares one parity."""

    parities: tuple[int, ...]

    def __post_init__(self):
        if not self.parities:
            raise AlgebraError("at least one canonical pair is required")
        if any(p not in (0, 1) for p in self.parities):
            raise AlgebraError("pair parities must be 0 or 1")
        object.__setattr__(self, "parities", tuple(int(p) for p in self.parities))

    @classmethod
    def bosonic(cls, n: int) -> "GeneratorSet":
        return cls((0,) * n)

    @classmethod
    def with_odd(cls, n: int, odd_pairs: Iterable[int] = ()) -> "GeneratorSet":
        odd = set(odd_pairs)
        bad = [i for i in odd if not 1 <= i <= n]
        if bad:
            raise AlgebraError(f"odd pair index out of range: {bad}")
        return cls(tuple(1 if i + 1 in odd else 0 for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.parities)

    def slot_parity(self, slot: int) -> int:
        return self.parities[slot % self.n]

    @property
    def odd_slots(self) -> tuple[int, ...]:
        return tuple(k for k in range(2 * self.n) if self.slot_parity(k))

    def slot(self, kind: str, index: int) -> int:
        if not 1 <= index <= self.n:
            raise AlgebraError(f"generator index {index} outside 1..{self.n}")
        if kind == "position":
            return index - 1
        if kind == "momentum":
            return self.n + index - 1
        raise AlgebraError(f"unknown generator kind {kind!r}")

    def name(self, slot: int) -> str:
        n = self.n
        index = slot % n + 1
        odd = self.parities[index - 1]
        if slot < n:
            return f"th{index}" if odd else f"q{index}"
        return f"pth{index}" if odd else f"p{index}"

    def monomials(self, max_degree: int, parity: int | None = None):
        """All exponent vectors of total degree ``<= max_degree``."""
        out = []
        odd = [self.slot_parity(k) for k in range(2 * self.n)]

        def rec(slot, left, acc):
            if slot == 2 * self.n:
                out.append(tuple(acc))
                return
            top = min(left, 1) if odd[slot] else left
            for e in range(top + 1):
                acc.append(e)
                rec(slot + 1, left - e, acc)
                acc.pop()

        rec(0, max_degree, [])
        if parity is not None:
            out = [m for m in out if _mono_parity(self.parities, m) == parity]
        out.sort(key=lambda m: (sum(m), m))
        return out


@dataclass(frozen=True)
class Generator:
    kind: str
    index: int
    parity: int


def _mono_parity(parities, exps) -> int:
    n = len(parities)
    total = 0
    for k, e in enumerate(exps):
        if e and parities[k % n]:
            total += e
    return total & 1


def _merge_sign(parities, left, right) -> int:
    """Sign (or 0) of ``x^left * x^right -> x^(left+right)`` for one block."""
    n = len(parities)
    flips = 0
    seen_odd = 0  # odd letters of ``left`` at indices strictly greater than j
    for j in range(len(left) - 1, -1, -1):
        if parities[j % n]:
            if left[j] and right[j]:
                return 0
            if right[j]:
                flips += seen_odd
            if left[j]:
                seen_odd += 1
    return -1 if flips & 1 else 1


@lru_cache(maxsize=1 << 18)
def _mono_mul(parities: tuple, a: tuple, b: tuple):
    """Normal-ordered product of two normal-ordered monomials.

    Returns a tuple of ``(exponents, hbar_shift, coefficient)``.
    """
    n = len(parities)
    x1, p1, x2, p2 = a[:n], a[n:], b[:n], b[n:]
    odd = parities

    # regroup p-block and x-block into per-pair factors p_i x_i
    flips = 0
    for i in range(n):
        if odd[i] and p1[i]:
            for j in range(i):
                if odd[j] and x2[j]:
                    flips += 1
    sign0 = -1 if flips & 1 else 1

    choices = []
    for i in range(n):
        bi, ci = p1[i], x2[i]
        if bi == 0 or ci == 0:
            choices.append(((0, 1, 0),))
        elif odd[i]:
            # pth th = -th pth + i*hbar
            choices.append(((0, -1, 0), (1, 1, 1)))
        else:
            opts = []
            for k in range(min(bi, ci) + 1):
                w = comb(bi, k) * comb(ci, k) * factorial(k)
                opts.append((k, w, (3 * k) % 4))  # (-i)^k
            choices.append(tuple(opts))

    out = {}
    for pick in product(*choices):
        mag = sign0
        phase = 0
        dh = 0
        xs = list(x2)
        ps = list(p1)
        for i, (k, w, ph) in enumerate(pick):
            mag *= w
            phase += ph
            dh += k
            xs[i] -= k
            ps[i] -= k
        # ungroup (x_i p_i) factors back into x-block p-block order
        flips = 0
        for j in range(n):
            if odd[j] and xs[j]:
                for i in range(j):
                    if odd[i] and ps[i]:
                        flips += 1
        if flips & 1:
            mag = -mag
        s1 = _merge_sign(odd, x1, xs)
        if not s1:
            continue
        s2 = _merge_sign(odd, ps, p2)
        if not s2:
            continue
        mag *= s1 * s2
        exps = tuple(x1[i] + xs[i] for i in range(n)) + tuple(ps[i] + p2[i] for i in range(n))
        key = (exps, dh)
        coeff = _IPOW[phase % 4] * mag
        prev = out.get(key)
        out[key] = coeff if prev is None else prev + coeff
    return tuple((k[0], k[1], c) for k, c in out.items() if c)


class OperatorPoly:
    """An exact normal-ordered operator polynomial.

    Treat instances as immutable; all arithmetic returns new objects.
    """

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, gens: GeneratorSet, terms=None, *, _clean=False):
        self.gens = gens
        if _clean:
            self.terms = terms
        else:
            acc = {}
            size = 2 * gens.n
            for (exps, h), c in (terms or {}).items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != size:
                    raise AlgebraError("exponent vector has wrong length")
                if any(e < 0 for e in exps) or h < 0:
                    raise AlgebraError("negative exponent")
                if any(exps[k] > 1 for k in gens.odd_slots):
                    continue  # th^2 = 0
                c = as_gaussian(c)
                key = (exps, int(h))
                acc[key] = acc.get(key, ZERO) + c
            self.terms = {k: v for k, v in acc.items() if v}
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, gens):
        return cls(gens, {}, _clean=True)

    @classmethod
    def constant(cls, gens, c=1, hbar_power: int = 0):
        c = as_gaussian(c)
        if not c:
            return cls.zero(gens)
        return cls(gens, {((0,) * (2 * gens.n), hbar_power): c}, _clean=True)

    @classmethod
    def one(cls, gens):
        return cls.constant(gens, 1)

    @classmethod
    def from_scalar(cls, gens, scalar: Scalar):
        unit = (0,) * (2 * gens.n)
        return cls(gens, {(unit, k): v for k, v in scalar.terms.items()})

    @classmethod
    def monomial(cls, gens, exps, c=1, hbar_power: int = 0):
        return cls(gens, {(tuple(exps), hbar_power): c})

    @classmethod
    def generator(cls, gens, kind: str, index: int):
        exps = [0] * (2 * gens.n)
        exps[gens.slot(kind, index)] = 1
        return cls(gens, {(tuple(exps), 0): ONE}, _clean=True)

    @classmethod
    def q(cls, gens, index: int):
        return cls.generator(gens, "position", index)

    @classmethod
    def p(cls, gens, index: int):
        return cls.generator(gens, "momentum", index)

    # basic protocol -----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, OperatorPoly):
            return self.gens == other.gens and self.terms == other.terms
        try:
            return self == OperatorPoly.constant(self.gens, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self.terms.items())))
        return self._hash

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def __repr__(self):
        from .render import render

        return f"OperatorPoly({render(self)!r})"

    def __str__(self):
        from .render import render

        return render(self)

    def _check(self, other) -> "OperatorPoly":
        if isinstance(other, OperatorPoly):
            if other.gens != self.gens:
                raise AlgebraError("operators live over different generator sets")
            return other
        if isinstance(other, Scalar):
            return OperatorPoly.from_scalar(self.gens, other)
        return OperatorPoly.constant(self.gens, other)

    # linear structure ---------------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            prev = out.get(k)
            if prev is None:
                out[k] = v
            else:
                s = prev + v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return OperatorPoly(self.gens, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return OperatorPoly(self.gens, {k: -v for k, v in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c, hbar_power: int = 0) -> "OperatorPoly":
        """Multiply by the central element ``c * hbar**hbar_power``."""
        c = as_gaussian(c)
        if not c:
            return OperatorPoly.zero(self.gens)
        return OperatorPoly(
            self.gens,
            {(m, h + hbar_power): v * c for (m, h), v in self.terms.items()},
            _clean=True,
        )

    def __mul__(self, other):
        if isinstance(other, OperatorPoly):
            return mul(self, other)
        if isinstance(other, Scalar):
            return mul(self, OperatorPoly.from_scalar(self.gens, other))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Scalar):
            return mul(OperatorPoly.from_scalar(self.gens, other), self)
        return self.scale(other)

    def __truediv__(self, other):
        c = as_gaussian(other)
        return self.scale(ONE / c)

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative operator power")
        out = OperatorPoly.one(self.gens)
        for _ in range(n):
            out = mul(out, self)
        return out

    # inspection ---------------------------------------------------------
    def degree(self) -> int:
        """Total generator degree (hbar does not count); -1 for zero."""
        return max((sum(m) for m, _ in self.terms), default=-1)

    def parity(self):
        return parity(self)

    def homogeneous_parts(self) -> dict[int, "OperatorPoly"]:
        parts: dict[int, dict] = {}
        par = self.gens.parities
        for key, v in self.terms.items():
            parts.setdefault(_mono_parity(par, key[0]), {})[key] = v
        return {e: OperatorPoly(self.gens, t, _clean=True) for e, t in parts.items()}

    def coefficient(self, exps) -> Scalar:
        exps = tuple(exps)
        return Scalar({h: v for (m, h), v in self.terms.items() if m == exps})

    def monomials(self) -> list[tuple]:
        return sorted({m for m, _ in self.terms})

    def hbar_free(self) -> bool:
        return all(h == 0 for _, h in self.terms)

    def is_scalar(self) -> bool:
        return all(not any(m) for m, _ in self.terms)

    def scalar_value(self) -> Scalar:
        if not self.is_scalar():
            raise AlgebraError("operator is not a multiple of the identity")
        return Scalar({h: v for (_, h), v in self.terms.items()})

    def divide_by_ihbar(self) -> "OperatorPoly":
        """Exact division by ``i*hbar``; raises if some term lacks the factor."""
        out = {}
        for (m, h), v in self.terms.items():
            if h == 0:
                raise HbarDivisionError("term without a factor of hbar cannot be divided by i*hbar")
            out[(m, h - 1)] = GaussianRational._raw(v.im, -v.re)
        return OperatorPoly(self.gens, out, _clean=True)

    def iter_terms(self) -> Iterator[tuple[tuple, int, GaussianRational]]:
        for (m, h), v in self.terms.items():
            yield m, h, v


def mul(x: OperatorPoly, y: OperatorPoly) -> OperatorPoly:
    """Product ``x*y`` brought back to normal order."""
    if x.gens != y.gens:
        raise AlgebraError("operators live over different generator sets")
    par = x.gens.parities
    out: dict = {}
    get = out.get
    for (m1, h1), c1 in x.terms.items():
        for (m2, h2), c2 in y.terms.items():
            c12 = c1 * c2
            h12 = h1 + h2
            for exps, dh, g in _mono_mul(par, m1, m2):
                key = (exps, h12 + dh)
                v = c12 * g
                prev = get(key)
                out[key] = v if prev is None else prev + v
    return OperatorPoly(x.gens, {k: v for k, v in out.items() if v}, _clean=True)


def parity(x: OperatorPoly):
    """0 or 1 for homogeneous operators, ``MIXED`` otherwise (zero is even)."""
    par = x.gens.parities
    seen = {_mono_parity(par, m) for m, _ in x.terms}
    if not seen:
        return 0
    if len(seen) == 2:
        return MIXED
    return seen.pop()


def _graded(x, y, sym: bool):
    if x.gens != y.gens:
        raise AlgebraError("operators live over different generator sets")
    out = OperatorPoly.zero(x.gens)
    xs = x.homogeneous_parts()
    ys = y.homogeneous_parts()
    for ex, xa in xs.items():
        for ey, yb in ys.items():
            sign = -1 if ex & ey else 1
            if sym:
                sign = -sign
            out = out + mul(xa, yb) - mul(yb, xa).scale(sign)
    return out


def scommutator(x: OperatorPoly, y: OperatorPoly) -> OperatorPoly:
    """Graded commutator ``xy - (-1)^(e_x e_y) yx``, split over parity parts."""
    return _graded(x, y, sym=False)


def ssym(x: OperatorPoly, y: OperatorPoly) -> OperatorPoly:
    """Graded symmetrized product ``(xy + (-1)^(e_x e_y) yx) / 2``."""
    return _graded(x, y, sym=True).scale(GaussianRational("1/2"))


def hbar_coeffs(x: OperatorPoly) -> list[tuple[int, OperatorPoly]]:
    """Split ``x = sum_n hbar^n x_n`` with hbar-free ``x_n``, ascending ``n``."""
    groups: dict[int, dict] = {}
    for (m, h), v in x.terms.items():
        groups.setdefault(h, {})[(m, 0)] = v
    return [(h, OperatorPoly(x.gens, groups[h], _clean=True)) for h in sorted(groups)]


def from_hbar_coeffs(gens, series) -> OperatorPoly:
    out = OperatorPoly.zero(gens)
    for h, part in series:
        out = out + part.scale(1, h)
    return out
