"""Text rendering of operators in the CLI expression syntax.

The output always reparses to the same operator: monomials are written in
normal order with explicit ``*`` and coefficients are parenthesized whenever
they contain a ``/`` or both a real and an imaginary part.
"""

from __future__ import annotations

from .scalar import GaussianRational, Rational


def _rat_plain(x) -> str:
    x = Rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _imag_plain(x) -> str:
    # |x| * i, sign handled by the caller
    x = Rational(x)
    num = "i" if x.numerator == 1 else f"{x.numerator}*i"
    if x.denominator == 1:
        return num
    return f"{num}/{x.denominator}"


def coefficient_text(c: GaussianRational) -> tuple[int, str]:
    """Return ``(sign, text)`` with ``text`` describing ``|c|`` up to sign."""
    if not c.im:
        sign = -1 if c.re < 0 else 1
        a = abs(c.re)
        if a == 1:
            return sign, ""
        s = _rat_plain(a)
        return sign, f"({s})" if "/" in s else s
    if not c.re:
        sign = -1 if c.im < 0 else 1
        s = _imag_plain(abs(c.im))
        return sign, f"({s})" if "/" in s else s
    re = _rat_plain(c.re)
    op = "-" if c.im < 0 else "+"
    return 1, f"({re} {op} {_imag_plain(abs(c.im))})"


def monomial_text(gens, exps) -> str:
    parts = []
    for slot, e in enumerate(exps):
        if not e:
            continue
        name = gens.name(slot)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def _term_key(item):
    (m, h), _ = item
    return (-sum(m), tuple(-e for e in m), h)


def render(op) -> str:
    if not op.terms:
        return "0"
    pieces = []
    for (m, h), c in sorted(op.terms.items(), key=_term_key):
        sign, coeff = coefficient_text(c)
        factors = []
        if coeff:
            factors.append(coeff)
        if h:
            factors.append("hbar" if h == 1 else f"hbar^{h}")
        if any(m):
            factors.append(monomial_text(op.gens, m))
        body = "*".join(factors) if factors else "1"
        pieces.append((sign, body))
    out = []
    for k, (sign, body) in enumerate(pieces):
        if k == 0:
            out.append(("-" if sign < 0 else "") + body)
        else:
            out.append((" - " if sign < 0 else " + ") + body)
    return "".join(out)
