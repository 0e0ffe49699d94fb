"""Seeded random operators for identity checks."""

from __future__ import annotations

import random

from .algebra import GeneratorSet, OperatorPoly
from .classical import ClassicalSymbol, weyl_order
from .scalar import GaussianRational, Rational

COEFF_POOL = (
    GaussianRational(1),
    GaussianRational(-1),
    GaussianRational(0, 1),
    GaussianRational(0, -1),
    GaussianRational(Rational(1, 2)),
    GaussianRational(Rational(-1, 2)),
)


def _pick_terms(rng: random.Random, gens: GeneratorSet, max_degree: int, parity, max_terms: int):
    monos = gens.monomials(max_degree, parity)
    if not monos:
        return {}
    count = rng.randint(1, min(max_terms, len(monos)))
    chosen = rng.sample(monos, count)
    return {(m, 0): rng.choice(COEFF_POOL) for m in chosen}


def random_operator(
    rng: random.Random, gens: GeneratorSet, max_degree: int, parity: int | None = 0, max_terms: int = 3
) -> OperatorPoly:
    """An hbar-free normal-ordered operator with up to ``max_terms`` monomials."""
    return OperatorPoly(gens, _pick_terms(rng, gens, max_degree, parity, max_terms))


def random_symbol(rng, gens, max_degree, parity=0, max_terms=3) -> ClassicalSymbol:
    return ClassicalSymbol(gens, _pick_terms(rng, gens, max_degree, parity, max_terms))


def random_weyl_operator(rng, gens, max_degree, parity=0, max_terms=3) -> OperatorPoly:
    """Weyl ordering of an hbar-free random symbol."""
    return weyl_order(random_symbol(rng, gens, max_degree, parity, max_terms))


def random_parity(rng: random.Random, gens: GeneratorSet) -> int:
    return rng.randint(0, 1) if any(gens.parities) else 0
