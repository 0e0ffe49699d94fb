"""Hyper-operators: linear maps on operators built from A+ and A-.

``A+ O = ssym(A, O)`` and ``A- O = scommutator(A, O) / (i hbar)``.  Chains are
kept as small expression trees and only evaluated when applied, so sums and
scalar multiples stay exact without choosing a superoperator basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import MIXED, OperatorPoly, parity, scommutator, ssym
from .scalar import as_gaussian

__all__ = [
    "apply_plus",
    "apply_minus",
    "apply_chain",
    "HyperOp",
    "Plus",
    "Minus",
    "Identity",
    "Compose",
    "Scaled",
    "Sum",
    "plus",
    "minus",
    "hyper_commutator",
]


def apply_plus(a: OperatorPoly, o: OperatorPoly) -> OperatorPoly:
    return ssym(a, o)


def apply_minus(a: OperatorPoly, o: OperatorPoly) -> OperatorPoly:
    """``(1/i hbar) [a, o}``; the bracket always carries the factor for polynomials."""
    return scommutator(a, o).divide_by_ihbar()


class HyperOp:
    """Base class; subclasses implement ``__call__`` and ``parity``."""

    parity: int

    def __call__(self, o: OperatorPoly) -> OperatorPoly:  # pragma: no cover
        raise NotImplementedError

    def __matmul__(self, other: "HyperOp") -> "HyperOp":
        return Compose((self, other))

    def __add__(self, other: "HyperOp") -> "HyperOp":
        return Sum((self, other))

    def __sub__(self, other: "HyperOp") -> "HyperOp":
        return Sum((self, Scaled(-1, other)))

    def __rmul__(self, c) -> "HyperOp":
        return Scaled(c, self)

    def __neg__(self) -> "HyperOp":
        return Scaled(-1, self)


@dataclass(frozen=True)
class Identity(HyperOp):
    parity: int = 0

    def __call__(self, o):
        return o


@dataclass(frozen=True)
class Plus(HyperOp):
    a: OperatorPoly

    def __post_init__(self):
        if parity(self.a) == MIXED:
            raise ValueError("leaf operators must have definite parity; use plus() to split")

    @property
    def parity(self):
        return parity(self.a)

    def __call__(self, o):
        return ssym(self.a, o)


@dataclass(frozen=True)
class Minus(HyperOp):
    a: OperatorPoly

    def __post_init__(self):
        if parity(self.a) == MIXED:
            raise ValueError("leaf operators must have definite parity; use minus() to split")

    @property
    def parity(self):
        return parity(self.a)

    def __call__(self, o):
        return apply_minus(self.a, o)


@dataclass(frozen=True)
class Compose(HyperOp):
    """``ops[0] @ ops[1] @ ...``; the rightmost factor acts first."""

    ops: tuple

    @property
    def parity(self):
        total = 0
        for op in self.ops:
            if op.parity == MIXED:
                return MIXED
            total += op.parity
        return total & 1

    def __call__(self, o):
        for op in reversed(self.ops):
            if o.is_zero():
                return o
            o = op(o)
        return o


@dataclass(frozen=True)
class Scaled(HyperOp):
    c: object
    op: HyperOp

    @property
    def parity(self):
        return self.op.parity

    def __call__(self, o):
        return self.op(o).scale(as_gaussian(self.c))


@dataclass(frozen=True)
class Sum(HyperOp):
    ops: tuple

    @property
    def parity(self):
        ps = {op.parity for op in self.ops}
        return ps.pop() if len(ps) == 1 else MIXED

    def __call__(self, o):
        out = OperatorPoly.zero(o.gens)
        for op in self.ops:
            out = out + op(o)
        return out


def plus(a: OperatorPoly) -> HyperOp:
    """``A+`` for arbitrary ``A``, split into homogeneous leaves."""
    parts = a.homogeneous_parts()
    if len(parts) <= 1:
        return Plus(a)
    return Sum(tuple(Plus(parts[e]) for e in sorted(parts)))


def minus(a: OperatorPoly) -> HyperOp:
    parts = a.homogeneous_parts()
    if len(parts) <= 1:
        return Minus(a)
    return Sum(tuple(Minus(parts[e]) for e in sorted(parts)))


def apply_chain(h: HyperOp | Sequence[HyperOp], o: OperatorPoly) -> OperatorPoly:
    if not isinstance(h, HyperOp):
        h = Compose(tuple(h)) if h else Identity()
    return h(o)


def hyper_commutator(a: HyperOp, b: HyperOp) -> HyperOp:
    """Graded hyper-commutator ``ab - (-1)^(e_a e_b) ba`` for homogeneous a, b."""
    if a.parity == MIXED or b.parity == MIXED:
        raise ValueError("hyper-commutator needs homogeneous arguments")
    sign = -1 if a.parity & b.parity else 1
    return Sum((Compose((a, b)), Scaled(-sign, Compose((b, a)))))
