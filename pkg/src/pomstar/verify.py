"""Randomized and exhaustive checks of the projection-method identities.

Every tag maps to one check function.  A check returns named sub-checks;
``primary`` sub-checks are the identity as displayed and decide pass/fail,
the others are informational variants (for example a corrected sign).
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import asdict, dataclass, field
from itertools import product

from .algebra import OperatorPoly, mul, parity, scommutator, ssym
from .constraints import ConstraintSystem
from .hyperops import Minus, Plus, hyper_commutator, minus, plus
from .projection import (
    HBAR_OVER_2I,
    project,
    projector_generating,
    resolution_generating,
    resolution_sum,
    series_216,
    series_217,
)
from .randops import random_operator, random_parity, random_weyl_operator
from .render import render
from .scalar import GaussianRational, Rational
from .starprod import (
    doubled_bracket,
    embed,
    exp_theta,
    grade,
    merge,
    project_factors,
    pstar,
    star_commutator,
    star_symprod,
)

__all__ = ["IdentityTag", "SubCheck", "TrialResult", "Report", "check_identity", "UnknownTagError"]

HALF = GaussianRational(Rational(1, 2))


class IdentityTag(str, enum.Enum):
    HC24 = "HC24"
    ZB28 = "ZB28"
    JINV29 = "JINV29"
    HZ210 = "HZ210"
    IDEM212 = "IDEM212"
    KILL213 = "KILL213"
    CS216 = "CS216"
    CS217 = "CS217"
    NL33 = "NL33"
    NL34 = "NL34"
    PROD36 = "PROD36"
    TH314 = "TH314"
    TH315 = "TH315"
    PAR317 = "PAR317"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"


class UnknownTagError(ValueError):
    pass


@dataclass
class SubCheck:
    name: str
    lhs: OperatorPoly
    rhs: OperatorPoly
    primary: bool = True

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


@dataclass
class TrialResult:
    index: int
    inputs: dict
    checks: dict = field(default_factory=dict)
    variants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


@dataclass
class Report:
    tag: str
    system: dict
    mode: str
    max_degree: int
    seed: int
    n: list | None
    results: list
    first_counterexample: dict | None = None
    _difference: OperatorPoly | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> int:
        return sum(not r.passed for r in self.results)

    def failure_counts(self) -> dict:
        """Failing trials per sub-check, primary and informational."""
        out: dict = {}
        for r in self.results:
            for name, ok in list(r.checks.items()) + list(r.variants.items()):
                out.setdefault(name, 0)
                if not ok:
                    out[name] += 1
        return out

    def difference(self) -> OperatorPoly | None:
        """``lhs - rhs`` of the first counterexample."""
        return self._difference

    def to_dict(self) -> dict:
        primary = sorted({k for r in self.results for k in r.checks})
        informational = sorted({k for r in self.results for k in r.variants})
        return {
            "tag": self.tag,
            "system": self.system,
            "mode": self.mode,
            "trials": len(self.results),
            "max_degree": self.max_degree,
            "seed": self.seed,
            "n": self.n,
            "passed": self.passed,
            "failures": self.failures,
            "checks": primary,
            "variants": informational,
            "failure_counts": self.failure_counts(),
            "first_counterexample": self.first_counterexample,
            "results": [asdict(r) for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def summary_lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.tag}: {status} {len(self.results) - self.failures}/{len(self.results)} trials ({self.mode})"]
        counts = self.failure_counts()
        primary = {k for r in self.results for k in r.checks}
        for name in sorted(counts, key=lambda k: (k not in primary, k)):
            kind = "check" if name in primary else "variant"
            lines.append(f"  {kind} {name}: {len(self.results) - counts[name]}/{len(self.results)}")
        if self.first_counterexample:
            ce = self.first_counterexample
            lines.append(f"  first counterexample (trial {ce['trial']}, {ce['check']}):")
            for k, v in ce["inputs"].items():
                lines.append(f"    {k} = {v}")
            lines.append(f"    lhs = {ce['lhs']}")
            lines.append(f"    rhs = {ce['rhs']}")
        return lines


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _sgn(k: int) -> int:
    return -1 if k & 1 else 1


def _p(sys, x):
    return project(x, sys)


def _graded_pair(prod, x, y, sym: bool):
    sign = -1 if parity(x) & parity(y) else 1
    a, b = prod(x, y), prod(y, x).scale(sign)
    return (a + b).scale(HALF) if sym else a - b


def _twisted(sys, sign: int, projected: bool):
    """Product ``merge(exp(sign (hbar/2i) Theta) x(eta) y(zeta))``, optionally projected."""

    def prod(x, y):
        d = exp_theta(embed(x, y), sys, sign=sign)
        if projected:
            d = project_factors(d, sys)
        return merge(d)

    return prod


def _unit(gens, c, h):
    return OperatorPoly.constant(gens, c, h)


# --------------------------------------------------------------------------
# per-tag checks; each returns a list of SubCheck
# --------------------------------------------------------------------------


def _check_hc24(sys, a, b, o):
    c = scommutator(a, b)
    out = []
    ihbar_quarter = GaussianRational(0, Rational(1, 4))
    pp = hyper_commutator(Plus(a), Plus(b))(o)
    mm = hyper_commutator(Minus(a), Minus(b))(o)
    pm = hyper_commutator(Plus(a), Minus(b))(o)
    mp = hyper_commutator(Minus(a), Plus(b))(o)
    if c.is_zero():
        zero = OperatorPoly.zero(o.gens)
        return [SubCheck("plus_plus", pp, zero), SubCheck("minus_minus", mm, zero),
                SubCheck("plus_minus", pm, zero), SubCheck("minus_plus", mp, zero)]
    cm = minus(c)(o)
    cp = plus(c)(o)
    out.append(SubCheck("plus_plus", pp, cm.scale(ihbar_quarter, 1)))
    out.append(SubCheck("minus_minus", mm, cm.divide_by_ihbar()))
    out.append(SubCheck("plus_minus", pm, cp.divide_by_ihbar()))
    out.append(SubCheck("minus_plus", mp, cp.divide_by_ihbar()))
    return out


def _check_zb28(sys):
    out = []
    for a, b in product(range(2 * sys.m), repeat=2):
        lhs = scommutator(sys.z[a], sys.z[b])
        rhs = _unit(sys.gens, GaussianRational(0, sys.jup[a][b]), 1)
        out.append(SubCheck(f"bracket_{a + 1}_{b + 1}", lhs, rhs))
    return out


def _check_jinv29(sys):
    gens = sys.gens
    ju, jl = sys.jup, sys.jlow
    size = 2 * sys.m
    out = []
    for a, c in product(range(size), repeat=2):
        left = sum(ju[a][b] * jl[b][c] for b in range(size))
        right = sum(jl[a][b] * ju[b][c] for b in range(size))
        delta = _unit(gens, 1 if a == c else 0, 0)
        out.append(SubCheck(f"upper_lower_{a + 1}_{c + 1}", _unit(gens, left, 0), delta))
        out.append(SubCheck(f"lower_upper_{a + 1}_{c + 1}", _unit(gens, right, 0), delta))
        # the upper matrix is minus (-1)^s times the lower one
        out.append(SubCheck(f"sign_relation_{a + 1}_{c + 1}", _unit(gens, ju[a][c], 0), _unit(gens, -_sgn(sys.s) * jl[a][c], 0)))
    return out


def _check_hz210(sys, o):
    out = []
    size = 2 * sys.m
    zero = OperatorPoly.zero(o.gens)
    for a, b in product(range(size), repeat=2):
        za, zb = sys.z[a], sys.z[b]
        tag = f"{a + 1}_{b + 1}"
        out.append(SubCheck(f"plus_plus_{tag}", hyper_commutator(Plus(za), Plus(zb))(o), zero))
        out.append(SubCheck(f"minus_minus_{tag}", hyper_commutator(Minus(za), Minus(zb))(o), zero))
        j = o.scale(sys.jup[a][b])
        out.append(SubCheck(f"plus_minus_{tag}", hyper_commutator(Plus(za), Minus(zb))(o), j))
        out.append(SubCheck(f"minus_plus_{tag}", hyper_commutator(Minus(za), Plus(zb))(o), j))
    return out


def _check_idem212(sys, x):
    px = _p(sys, x)
    out = [
        SubCheck("idempotent", _p(sys, px), px),
        SubCheck("resolution_series", resolution_sum(x, sys), x),
        SubCheck("resolution_exponential_minus", resolution_generating(x, sys, "minus"), x),
        SubCheck("resolution_exponential_plus", resolution_generating(x, sys, "plus"), x),
        SubCheck("projector_exponential_form", projector_generating(x, sys), px),
    ]
    if sys.m > 1:
        out.append(SubCheck("factored_equals_series", px, project(x, sys, method="series")))
    return out


def _check_kill213(sys, x):
    zero = OperatorPoly.zero(x.gens)
    px = _p(sys, x)
    out = []
    for a in range(2 * sys.m):
        out.append(SubCheck(f"projects_constraint_{a + 1}", _p(sys, sys.z[a]), zero))
        out.append(SubCheck(f"after_plus_{a + 1}", _p(sys, sys.zplus(a, x)), zero))
        out.append(SubCheck(f"minus_after_projection_{a + 1}", sys.zminus(a, px), zero))
    return out


def _check_cs216(sys, x, y):
    px, py = _p(sys, x), _p(sys, y)
    return [
        SubCheck("commutator", scommutator(px, py), series_216("commutator", x, y, sys)),
        SubCheck("symmetrized", ssym(px, py), series_216("symmetrized", x, y, sys)),
    ]


def _check_cs217(sys, x, y):
    return [
        SubCheck("commutator", _p(sys, scommutator(x, y)), series_217("commutator", x, y, sys)),
        SubCheck("symmetrized", _p(sys, ssym(x, y)), series_217("symmetrized", x, y, sys)),
    ]


def _cosh(sys, d):
    return exp_theta(d, sys, parts="even")


def _sinh(sys, d):
    return exp_theta(d, sys, parts="odd")


def _check_nl33(sys, x, y):
    sg = _sgn(sys.s)
    cb, sb = doubled_bracket(x, y, False), doubled_bracket(x, y, True)
    px, py = _p(sys, x), _p(sys, y)
    rc = _p(sys, merge(_cosh(sys, cb) + _sinh(sys, sb).scale(2 * sg)))
    rs = _p(sys, merge(_cosh(sys, sb) + _sinh(sys, cb).scale(HALF * sg)))
    return [SubCheck("commutator", scommutator(px, py), rc), SubCheck("symmetrized", ssym(px, py), rs)]


def _check_nl34(sys, x, y):
    sg = _sgn(sys.s)
    cb, sb = doubled_bracket(x, y, False), doubled_bracket(x, y, True)
    rc = merge(project_factors(_cosh(sys, cb) - _sinh(sys, sb).scale(2 * sg), sys))
    rs = merge(project_factors(_cosh(sys, sb) - _sinh(sys, cb).scale(HALF * sg), sys))
    return [
        SubCheck("commutator", _p(sys, scommutator(x, y)), rc),
        SubCheck("symmetrized", _p(sys, ssym(x, y)), rs),
    ]


def _check_prod36(sys, x, y):
    """Product of projections and projection of a product, both nonlocal forms.

    ``x(zeta) y(eta)`` is the orientation-1 pair: the copy labels swap but
    ``x`` stays on the left when the copies are identified.
    """
    sg = _sgn(sys.s)
    d0, d1 = embed(x, y, 0), embed(x, y, 1)
    px, py = _p(sys, x), _p(sys, y)
    prod_of_proj = mul(px, py)
    proj_of_prod = _p(sys, mul(x, y))
    sym_part = (d0 + d1).scale(HALF)
    anti_part = (d0 - d1).scale(HALF)
    return [
        SubCheck("product_hyperbolic", prod_of_proj, _p(sys, merge(_cosh(sys, d0) + _sinh(sys, d0).scale(sg)))),
        SubCheck("product_exponential", prod_of_proj, _p(sys, merge(exp_theta(sym_part + anti_part.scale(sg), sys)))),
        SubCheck(
            "projected_product_hyperbolic",
            proj_of_prod,
            merge(project_factors(_cosh(sys, d0) - _sinh(sys, d0).scale(sg), sys)),
        ),
        SubCheck(
            "projected_product_exponential",
            proj_of_prod,
            merge(project_factors(exp_theta(sym_part - anti_part.scale(sg), sys), sys)),
        ),
        SubCheck("product_split", prod_of_proj, scommutator(px, py).scale(HALF) + ssym(px, py)),
    ]


def _check_th314(sys, x, y):
    s = sys.s
    px, py = _p(sys, x), _p(sys, y)
    lc, ls = scommutator(px, py), ssym(px, py)
    fixed = _twisted(sys, _sgn(s), False)
    return [
        SubCheck("commutator", lc, _p(sys, star_commutator("star", x, y, sys)).scale(_sgn(s))),
        SubCheck("symmetrized", ls, _p(sys, star_symprod("star", x, y, sys))),
        # exponent sign (-1)^s and no prefactor
        SubCheck("commutator_signed_exponent", lc, _p(sys, _graded_pair(fixed, x, y, False)), primary=False),
        SubCheck("symmetrized_signed_exponent", ls, _p(sys, _graded_pair(fixed, x, y, True)), primary=False),
    ]


def _check_th315(sys, x, y):
    s = sys.s
    lc, ls = _p(sys, scommutator(x, y)), _p(sys, ssym(x, y))
    fixed = _twisted(sys, -_sgn(s), True)
    return [
        SubCheck("commutator", lc, star_commutator("pstar", x, y, sys).scale(-_sgn(s))),
        SubCheck("symmetrized", ls, star_symprod("pstar", x, y, sys)),
        SubCheck("commutator_signed_exponent", lc, _graded_pair(fixed, x, y, False), primary=False),
        SubCheck("symmetrized_signed_exponent", ls, _graded_pair(fixed, x, y, True), primary=False),
        SubCheck(
            "projection_before_exponential",
            pstar(x, y, sys),
            pstar(x, y, sys, project_first=True),
            primary=False,
        ),
    ]


def _odd_part(series):
    gens = None
    out = []
    for h, part in series:
        gens = part.gens
        if h % 2:
            out.append(part.scale(1, h))
    if not out:
        return None
    total = OperatorPoly.zero(gens)
    for t in out:
        total = total + t
    return total


def _check_par317(sys, xw, yw, xn, yn):
    """Odd hbar orders of a projected symmetrized product vanish.

    ``xw, yw`` are Weyl-ordered hbar-free inputs graded by Weyl symbol;
    ``xn, yn`` are hbar-free normal-ordered inputs graded by coefficients.
    """
    zero = OperatorPoly.zero(sys.gens)
    out = []
    for name, a, b, basis, primary in (
        ("weyl_symbols", xw, yw, "weyl", True),
        ("weyl_inputs_normal_grading", xw, yw, "normal", False),
        ("normal_ordered", xn, yn, "normal", False),
    ):
        odd = _odd_part(grade(_p(sys, ssym(a, b)), basis))
        out.append(SubCheck(name, zero if odd is None else odd, zero, primary))
    return out


def _check_ladder(tag, sys, x, y, n, alphas):
    """``alphas`` has length ``2n`` (A1, A3) or ``2n + 1`` (A2, A4)."""
    s = sys.s
    k = len(alphas)
    c, h = HBAR_OVER_2I
    coeff = c ** k
    zy = sys.zplus_chain(alphas, y)
    zx = sys.zminus_chain(alphas, x)
    ex = parity(x)
    if tag is IdentityTag.A1:
        lhs, rhs = _p(sys, scommutator(x, zy)), _p(sys, scommutator(zx, y)).scale(coeff * _sgn(n * s), h * k)
    elif tag is IdentityTag.A2:
        lhs, rhs = _p(sys, scommutator(x, zy)), _p(sys, ssym(zx, y)).scale(coeff * 2 * _sgn(ex * s + n * s), h * k)
    elif tag is IdentityTag.A3:
        lhs, rhs = _p(sys, ssym(x, zy)), _p(sys, ssym(zx, y)).scale(coeff * _sgn(n * s), h * k)
    else:
        lhs, rhs = _p(sys, ssym(x, zy)), _p(sys, scommutator(zx, y)).scale(coeff * HALF * _sgn(ex * s + n * s), h * k)
    return [SubCheck(f"n={n}", lhs, rhs)]


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

_PAIR_TAGS = {
    IdentityTag.CS216: _check_cs216,
    IdentityTag.CS217: _check_cs217,
    IdentityTag.NL33: _check_nl33,
    IdentityTag.NL34: _check_nl34,
    IdentityTag.PROD36: _check_prod36,
    IdentityTag.TH314: _check_th314,
    IdentityTag.TH315: _check_th315,
}
_SINGLE_TAGS = {
    IdentityTag.IDEM212: _check_idem212,
    IdentityTag.KILL213: _check_kill213,
    IdentityTag.HZ210: _check_hz210,
}
_LADDER_TAGS = (IdentityTag.A1, IdentityTag.A2, IdentityTag.A3, IdentityTag.A4)


def _label(v) -> str:
    if isinstance(v, OperatorPoly):
        return render(v)
    return " ".join(str(a + 1) for a in v)


def _as_tag(tag) -> IdentityTag:
    if isinstance(tag, IdentityTag):
        return tag
    try:
        return IdentityTag(str(tag).upper())
    except ValueError:
        raise UnknownTagError(f"unknown identity tag {tag!r}") from None


def _exhaustive_inputs(sys, max_degree, arity):
    monos = [m for m in sys.gens.monomials(max_degree) if any(m)]
    singles = [OperatorPoly.monomial(sys.gens, m) for m in monos]
    return list(product(singles, repeat=arity))


def _sampled_inputs(sys, rng, max_degree, arity):
    out = []
    for _ in range(arity):
        out.append(random_operator(rng, sys.gens, max_degree, random_parity(rng, sys.gens)))
    return tuple(out)


def check_identity(
    tag,
    sys: ConstraintSystem,
    trials: int = 50,
    max_degree: int = 3,
    seed: int = 0,
    n=None,
    exhaustive: bool | None = None,
) -> Report:
    """Evaluate both sides of identity ``tag`` exactly on random inputs.

    ``n`` selects the ladder index (an int or a sequence; default
    ``0, 1, 2``).  Inputs are enumerated instead of sampled when
    ``max_degree <= 2`` and the system has a single ACCS pair, unless
    ``exhaustive`` says otherwise.
    """
    tag = _as_tag(tag)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if exhaustive is None:
        exhaustive = max_degree <= 2 and sys.m == 1
    rng = random.Random(seed)
    ns = None
    if tag in _LADDER_TAGS:
        ns = [0, 1, 2] if n is None else ([n] if isinstance(n, int) else list(n))

    cases = _cases(tag, sys, rng, trials, max_degree, exhaustive, ns)
    results = []
    first = None
    diff = None
    for index, (inputs, subs) in enumerate(cases):
        tr = TrialResult(index=index, inputs={k: _label(v) for k, v in inputs.items()})
        for sc in subs:
            ok = sc.passed
            (tr.checks if sc.primary else tr.variants)[sc.name] = ok
            if not ok and sc.primary and first is None:
                first = {
                    "trial": index,
                    "check": sc.name,
                    "inputs": dict(tr.inputs),
                    "lhs": render(sc.lhs),
                    "rhs": render(sc.rhs),
                }
                diff = sc.lhs - sc.rhs
        results.append(tr)
    structural = tag in (IdentityTag.ZB28, IdentityTag.JINV29)
    mode = "structural" if structural else ("exhaustive" if exhaustive else "sampled")
    return Report(
        tag=tag.value,
        system=sys.describe(),
        mode=mode,
        max_degree=max_degree,
        seed=seed,
        n=ns,
        results=results,
        first_counterexample=first,
        _difference=diff,
    )


def _cases(tag, sys, rng, trials, max_degree, exhaustive, ns):
    """Yield ``(inputs, subchecks)`` per trial, evaluated lazily."""
    if tag is IdentityTag.ZB28:
        yield {}, _check_zb28(sys)
        return
    if tag is IdentityTag.JINV29:
        yield {}, _check_jinv29(sys)
        return
    if tag is IdentityTag.HC24:
        if exhaustive:
            for a, b, o in _exhaustive_inputs(sys, max_degree, 3):
                yield {"A": a, "B": b, "O": o}, _check_hc24(sys, a, b, o)
            return
        for _ in range(trials):
            a, b, o = _sampled_inputs(sys, rng, max_degree, 3)
            yield {"A": a, "B": b, "O": o}, _check_hc24(sys, a, b, o)
        return
    if tag in _SINGLE_TAGS:
        fn = _SINGLE_TAGS[tag]
        pool = [t[0] for t in _exhaustive_inputs(sys, max_degree, 1)] if exhaustive else None
        for k in range(len(pool) if exhaustive else trials):
            x = pool[k] if exhaustive else _sampled_inputs(sys, rng, max_degree, 1)[0]
            yield {"X": x}, fn(sys, x)
        return
    if tag is IdentityTag.PAR317:
        for _ in range(trials):
            ex, ey = random_parity(rng, sys.gens), random_parity(rng, sys.gens)
            xw = random_weyl_operator(rng, sys.gens, max_degree, ex)
            yw = random_weyl_operator(rng, sys.gens, max_degree, ey)
            xn = random_operator(rng, sys.gens, max_degree, ex)
            yn = random_operator(rng, sys.gens, max_degree, ey)
            yield {"X": xw, "Y": yw, "X_normal": xn, "Y_normal": yn}, _check_par317(sys, xw, yw, xn, yn)
        return
    if tag in _PAIR_TAGS:
        fn = _PAIR_TAGS[tag]
        pairs = _exhaustive_inputs(sys, max_degree, 2) if exhaustive else None
        for k in range(len(pairs) if exhaustive else trials):
            x, y = pairs[k] if exhaustive else _sampled_inputs(sys, rng, max_degree, 2)
            yield {"X": x, "Y": y}, fn(sys, x, y)
        return
    if tag in _LADDER_TAGS:
        odd = tag in (IdentityTag.A2, IdentityTag.A4)
        size = 2 * sys.m
        pairs = _exhaustive_inputs(sys, max_degree, 2) if exhaustive else None
        for k in range(len(pairs) if exhaustive else trials):
            x, y = pairs[k] if exhaustive else _sampled_inputs(sys, rng, max_degree, 2)
            subs = []
            labels = {"X": x, "Y": y}
            for n in ns:
                length = 2 * n + (1 if odd else 0)
                alphas = tuple(rng.randrange(size) for _ in range(length))
                labels[f"alphas(n={n})"] = alphas
                subs += _check_ladder(tag, sys, x, y, n, alphas)
            yield labels, subs
        return
    raise UnknownTagError(f"no check registered for {tag!r}")  # pragma: no cover
