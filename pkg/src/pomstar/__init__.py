"""Exact projection operators and constraint star products for polynomial operators."""

from .algebra import GeneratorSet, OperatorPoly, hbar_coeffs, mul, parity, scommutator, ssym
from .classical import ClassicalSymbol, dirac_bracket, moyal, poisson, weyl_order, weyl_symbol
from .constraints import ConstraintError, ConstraintSystem, build_accs_linear, validate_accs
from .hyperops import apply_minus, apply_plus, minus, plus
from .parser import ParseError, parse, parse_operator
from .projection import expansion_term, project, project_system, series_216, series_217
from .render import render
from .scalar import GaussianRational
from .starprod import embed, hbar_series_of, merge, pstar, star, star_commutator, star_symprod
from .verify import IdentityTag, check_identity

__version__ = "0.1.0"

__all__ = [
    "GeneratorSet",
    "OperatorPoly",
    "GaussianRational",
    "mul",
    "parity",
    "scommutator",
    "ssym",
    "hbar_coeffs",
    "apply_plus",
    "apply_minus",
    "plus",
    "minus",
    "ConstraintSystem",
    "ConstraintError",
    "build_accs_linear",
    "validate_accs",
    "project",
    "project_system",
    "expansion_term",
    "series_216",
    "series_217",
    "embed",
    "merge",
    "star",
    "pstar",
    "star_commutator",
    "star_symprod",
    "hbar_series_of",
    "ClassicalSymbol",
    "moyal",
    "poisson",
    "dirac_bracket",
    "weyl_order",
    "weyl_symbol",
    "parse",
    "parse_operator",
    "ParseError",
    "render",
    "IdentityTag",
    "check_identity",
]
