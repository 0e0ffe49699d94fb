"""Independent reference evaluations used by the tests.

Nothing here reuses the caches or recursions of the package: words are
reordered one adjacent swap at a time, and series are summed over explicit
index tuples with plain hyper-operator objects.
"""

import random
from itertools import permutations, product
from math import factorial

from pomstar.algebra import GeneratorSet, OperatorPoly, mul
from pomstar.hyperops import Minus, Plus
from pomstar.scalar import GaussianRational, Rational

I = GaussianRational(0, 1)


def _sgn(k):
    return -1 if k & 1 else 1


# ---------------------------------------------------------------- words


def word_to_operator(gens, word, rng=None):
    """Normal-order a word of generator slots by random adjacent swaps.

    A swap of neighbours ``a b`` with ``a`` after ``b`` in normal order uses
    ``a b = (-1)^(e_a e_b) b a + [a, b}``.  The swap position is chosen at
    random each time, so agreement with ``mul`` checks order independence.
    """
    rng = rng or random.Random(0)
    n = gens.n
    par = gens.parities
    odd = [par[k % n] for k in range(2 * n)]
    todo = {(tuple(word), 0): GaussianRational(1)}
    done = {}
    while todo:
        (w, h), c = todo.popitem()
        bad = [k for k in range(len(w) - 1) if w[k] > w[k + 1] or (w[k] == w[k + 1] and odd[w[k]])]
        if not bad:
            exps = [0] * (2 * n)
            for slot in w:
                exps[slot] += 1
            key = (tuple(exps), h)
            done[key] = done.get(key, GaussianRational(0)) + c
            continue
        k = rng.choice(bad)
        a, b = w[k], w[k + 1]
        if a == b:
            continue  # odd square vanishes
        sign = -1 if odd[a] and odd[b] else 1
        swapped = w[:k] + (b, a) + w[k + 2 :]
        key = (swapped, h)
        todo[key] = todo.get(key, GaussianRational(0)) + c * sign
        if a == b + n:
            # p_i x_i -> bracket [p, q] = -i hbar, odd [pth, th} = +i hbar
            bracket = I if odd[a] else -I
            short = w[:k] + w[k + 2 :]
            key = (short, h + 1)
            todo[key] = todo.get(key, GaussianRational(0)) + c * bracket
        todo = {k2: v for k2, v in todo.items() if v}
    return OperatorPoly(gens, done)


# ------------------------------------------------------------ projector


def project_term_by_term(x, sys, top=None):
    """Sum of the projector series over explicit index tuples."""
    top = x.degree() if top is None else top
    size = 2 * sys.m
    out = x
    for n in range(1, top + 1):
        acc = OperatorPoly.zero(x.gens)
        for alphas in product(range(size), repeat=n):
            for betas in product(range(size), repeat=n):
                j = 1
                for a, b in zip(alphas, betas):
                    j *= sys.jup[a][b]
                if not j:
                    continue
                y = x
                for b in betas:  # Z-_{b1} acts first
                    y = Minus(sys.z[b])(y)
                for a in reversed(alphas):  # Z+_{an} acts first
                    y = Plus(sys.z[a])(y)
                acc = acc + y.scale(j)
        out = out + acc.scale(GaussianRational(Rational(_sgn(n * sys.s), factorial(n))))
    return out


# --------------------------------------------------------- star product


def _chain(sys, alphas, x):
    for a in alphas:
        x = Minus(sys.z[a])(x)
    return x


def star_term_by_term(x, y, sys, projected=False, top=None, sign=1):
    """Star product from the merge rule for lowered factors.

    ``(Z-_{a_k}..X)(Z-_{b_k}..Y)`` carries ``(-1)^(floor(k/2) s + [k odd] e_X s)``
    relative to the two-copy word ``Theta^k X(eta) Y(zeta)``.
    """
    from pomstar.algebra import parity

    top = min(x.degree(), y.degree()) if top is None else top
    s = sys.s
    ex = parity(x)
    half = GaussianRational(0, Rational(-1, 2)) * sign  # hbar/2i without hbar
    size = 2 * sys.m
    proj = (lambda o: project_term_by_term(o, sys)) if projected else (lambda o: o)
    out = OperatorPoly.zero(x.gens)
    for k in range(top + 1):
        acc = OperatorPoly.zero(x.gens)
        for alphas in product(range(size), repeat=k):
            for betas in product(range(size), repeat=k):
                j = 1
                for a, b in zip(alphas, betas):
                    j *= sys.jup[a][b]
                if not j:
                    continue
                xa, yb = _chain(sys, alphas, x), _chain(sys, betas, y)
                if xa.is_zero() or yb.is_zero():
                    continue
                acc = acc + mul(proj(xa), proj(yb)).scale(j)
        sg = _sgn((k // 2) * s + (k % 2) * ex * s)
        coeff = half ** k * GaussianRational(Rational(sg, factorial(k)))
        out = out + acc.scale(coeff, k)
    return out


# ------------------------------------------------------------ Weyl map


def weyl_brute(gens, exps):
    """Average of all orderings of the letters of a monomial, with Grassmann signs."""
    n = gens.n
    par = gens.parities
    letters = []
    for slot, e in enumerate(exps):
        letters += [slot] * e
    total = OperatorPoly.zero(gens)
    count = 0
    for perm in permutations(range(len(letters))):
        # sign of permuting odd letters relative to the reference order
        odd_pos = [p for p in perm if par[letters[p] % n]]
        inv = sum(1 for i in range(len(odd_pos)) for j in range(i + 1, len(odd_pos)) if odd_pos[i] > odd_pos[j])
        word = [letters[p] for p in perm]
        w = OperatorPoly.one(gens)
        for slot in word:
            mono = [0] * (2 * n)
            mono[slot] = 1
            w = mul(w, OperatorPoly.monomial(gens, mono))
        total = total + w.scale(_sgn(inv))
        count += 1
    return total.scale(GaussianRational(Rational(1, count)))


def restrict_symbol(sym, slots):
    """Drop every term of a classical symbol that involves one of ``slots``."""
    from pomstar.classical import ClassicalSymbol

    return ClassicalSymbol(sym.gens, {(m, h): c for (m, h), c in sym.terms.items() if not any(m[k] for k in slots)})


def gens_for(n, odd=()):
    return GeneratorSet.with_odd(n, odd)
