"""Command-line driver: ``pomstar <command> [options]``.

Exit codes: 0 success, 2 parse error, 3 invalid constraint system,
4 identity-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra import AlgebraError, GeneratorSet, OperatorPoly, hbar_coeffs
from .classical import moyal
from .constraints import ConstraintError, ConstraintSystem, build_accs_linear, validate_accs
from .parser import ParseError, evaluate, evaluate_symbol, max_index, odd_indices, parse, split_top_level
from .projection import project
from .render import monomial_text, render
from .scalar import format_rational
from .starprod import grade, hbar_series_of, pstar, star
from .verify import IdentityTag, check_identity

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SYSTEM = 3
EXIT_IDENTITY = 4

OUTPUT_SCHEMA = {
    "type": "object",
    "required": ["hbar_series", "meta"],
    "properties": {
        "hbar_series": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["power", "terms"],
                "properties": {
                    "power": {"type": "integer"},
                    "terms": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["monomial", "re", "im"],
                            "properties": {
                                "monomial": {"type": "string"},
                                "re": {"type": "string", "pattern": "^-?[0-9]+/[0-9]+$"},
                                "im": {"type": "string", "pattern": "^-?[0-9]+/[0-9]+$"},
                            },
                        },
                    },
                },
            },
        },
        "meta": {"type": "object"},
    },
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# argument handling
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pomstar",
        description="Exact projection operators and constraint star products for polynomial operators.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, constraints=True):
        p.add_argument("--pairs", type=int, help="number of canonical pairs N (default: highest index used)")
        p.add_argument("--odd-pairs", default=None, help="comma-separated odd pair indices (default: from th/pth tokens)")
        if constraints:
            p.add_argument("--constraints", help='linear constraints, e.g. "q1,p1"')
            p.add_argument("--accs", help='ACCS pairs given directly, e.g. "q1,p1;q2,p2"')
            p.add_argument("--parity", type=int, choices=(0, 1), help="expected ACCS parity s")
            p.add_argument("--order", type=int, help="truncation order (required for nonlinear ACCS)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("project", help="apply the projection hyper-operator")
    common(p)
    p.add_argument("--expr", required=True, help='operator expression ("-" reads stdin)')

    for name, text in (("star", "constraint star product"), ("pstar", "projected constraint star product")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--lhs", required=True)
        p.add_argument("--rhs", required=True)
        if name == "pstar":
            p.add_argument("--project-first", action="store_true", help="project before the exponential")

    p = sub.add_parser("series", help="hbar series of [PX, PY] or P{X, Y}")
    common(p)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--kind", choices=("commutator", "symmetrized"), default="commutator")
    p.add_argument("--basis", choices=("normal", "weyl"), default="normal")

    p = sub.add_parser("moyal", help="Moyal product of two classical symbols")
    common(p, constraints=False)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)

    p = sub.add_parser("verify", help="run an identity check")
    common(p)
    p.add_argument("--tag", required=True, help="identity tag, e.g. IDEM212")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--n", type=int, default=None, help="index n for the A1-A4 tags (default 0, 1, 2)")
    return ap


def _read(src: str, stdin) -> str:
    return stdin.read() if src == "-" else src


class _Inputs:
    """Parses every expression once and derives the generator set."""

    def __init__(self, args, stdin):
        self.args = args
        self.sources: dict[str, object] = {}
        for key in ("expr", "lhs", "rhs"):
            val = getattr(args, key, None)
            if val is not None:
                self.sources[key] = parse(_read(val, stdin))
        self.constraints = [parse(c) for c in split_top_level(getattr(args, "constraints", None) or "")]
        self.accs = []
        for chunk in (getattr(args, "accs", None) or "").split(";"):
            items = split_top_level(chunk)
            if not items:
                continue
            if len(items) != 2:
                raise CliError(f"ACCS entry {chunk.strip()!r} must be a pair 'xi,pi'", EXIT_SYSTEM)
            self.accs.append(tuple(parse(x) for x in items))
        nodes = list(self.sources.values()) + self.constraints + [x for pair in self.accs for x in pair]
        top = max((max_index(n) for n in nodes), default=1)
        n = args.pairs if args.pairs is not None else max(top, 1)
        if n < 1:
            raise CliError("--pairs must be positive", EXIT_PARSE)
        if args.odd_pairs:
            try:
                odd = {int(x) for x in args.odd_pairs.split(",") if x.strip()}
            except ValueError:
                raise CliError(f"bad --odd-pairs value {args.odd_pairs!r}", EXIT_PARSE) from None
        else:
            odd = set()
            for node in nodes:
                odd |= odd_indices(node)
        bad = [k for k in odd if not 1 <= k <= n]
        if bad:
            raise CliError(f"odd pair indices {sorted(bad)} outside 1..{n}", EXIT_PARSE)
        self.gens = GeneratorSet.with_odd(n, sorted(odd))

    def operator(self, key) -> OperatorPoly:
        return evaluate(self.sources[key], self.gens)

    def system(self) -> ConstraintSystem:
        args = self.args
        if self.accs:
            pairs = [(evaluate(a, self.gens), evaluate(b, self.gens)) for a, b in self.accs]
            cons = [evaluate(c, self.gens) for c in self.constraints]
            sys_ = ConstraintSystem.from_accs(pairs, cons, s=args.parity)
        elif self.constraints:
            sys_ = build_accs_linear([evaluate(c, self.gens) for c in self.constraints], self.gens.n)
            if args.parity is not None and sys_.s != args.parity:
                raise ConstraintError(f"constraints have parity {sys_.s}, expected {args.parity}")
        else:
            raise ConstraintError("no constraint system: give --constraints or --accs")
        report = validate_accs(sys_, probe_degree=2)
        if not report.passed:
            bad = report.first_failure
            raise ConstraintError(f"invalid ACCS ({bad.name}): {bad.detail}")
        if not sys_.linear and args.order is None:
            raise ConstraintError("nonlinear ACCS: --order is required")
        return sys_


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def series_json(series, gens) -> list[dict]:
    out = []
    for h, part in series:
        terms = []
        for (m, _), c in sorted(part.terms.items(), key=lambda kv: (-sum(kv[0][0]), tuple(-e for e in kv[0][0]))):
            terms.append({"monomial": monomial_text(gens, m), "re": format_rational(c.re), "im": format_rational(c.im)})
        out.append({"power": h, "terms": terms})
    return out


def document(series, gens, meta: dict) -> dict:
    return {"hbar_series": series_json(series, gens), "meta": meta}


def validate_document(doc: dict) -> None:
    import jsonschema

    jsonschema.validate(doc, OUTPUT_SCHEMA)


def _emit(args, stdout, text_lines, doc):
    if args.format == "json":
        validate_document(doc)
        stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        stdout.write("\n".join(text_lines) + "\n")


def _meta(args, inputs, sys_=None, **extra) -> dict:
    odd = [i + 1 for i, p in enumerate(inputs.gens.parities) if p]
    meta = {"command": args.command, "pairs": inputs.gens.n, "odd_pairs": odd}
    if sys_ is not None:
        meta["system"] = sys_.describe()
        if not sys_.linear:
            meta["truncated"] = True
            meta["order"] = args.order
    meta.update(extra)
    return meta


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _cmd_project(args, inputs, stdout):
    sys_ = inputs.system()
    result = project(inputs.operator("expr"), sys_, args.order)
    text = render(result)
    _emit(args, stdout, [text], document(hbar_coeffs(result), inputs.gens, _meta(args, inputs, sys_, result=text)))
    return EXIT_OK


def _cmd_star(args, inputs, stdout):
    sys_ = inputs.system()
    x, y = inputs.operator("lhs"), inputs.operator("rhs")
    if args.command == "star":
        result = star(x, y, sys_, args.order)
    else:
        result = pstar(x, y, sys_, args.order, project_first=args.project_first)
    text = render(result)
    _emit(args, stdout, [text], document(hbar_coeffs(result), inputs.gens, _meta(args, inputs, sys_, result=text)))
    return EXIT_OK


def _cmd_series(args, inputs, stdout):
    sys_ = inputs.system()
    x, y = inputs.operator("lhs"), inputs.operator("rhs")
    series = hbar_series_of(args.kind, x, y, sys_, basis=args.basis, order=args.order)
    lines = [f"hbar^{h}: {render(part)}" for h, part in series] or ["0"]
    meta = _meta(args, inputs, sys_, kind=args.kind, basis=args.basis)
    _emit(args, stdout, lines, document(series, inputs.gens, meta))
    return EXIT_OK


def _cmd_moyal(args, inputs, stdout):
    if any(inputs.gens.parities):
        raise CliError("the Moyal product is defined here for even generators only", EXIT_PARSE)
    f = evaluate_symbol(inputs.sources["lhs"], inputs.gens)
    g = evaluate_symbol(inputs.sources["rhs"], inputs.gens)
    result = moyal(f, g).to_operator_naive()
    text = render(result)
    _emit(args, stdout, [text], document(hbar_coeffs(result), inputs.gens, _meta(args, inputs, result=text)))
    return EXIT_OK


def _cmd_verify(args, inputs, stdout):
    try:
        tag = IdentityTag(args.tag.upper())
    except ValueError:
        raise CliError(f"unknown identity tag {args.tag!r}; known: {', '.join(t.value for t in IdentityTag)}", EXIT_PARSE) from None
    sys_ = inputs.system()
    report = check_identity(tag, sys_, trials=args.trials, max_degree=args.max_degree, seed=args.seed, n=args.n)
    diff = report.difference()
    series = grade(diff) if diff is not None else []
    _emit(args, stdout, report.summary_lines(), document(series, inputs.gens, _meta(args, inputs, sys_, report=report.to_dict())))
    return EXIT_OK if report.passed else EXIT_IDENTITY


_COMMANDS = {
    "project": _cmd_project,
    "star": _cmd_star,
    "pstar": _cmd_star,
    "series": _cmd_series,
    "moyal": _cmd_moyal,
    "verify": _cmd_verify,
}


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        inputs = _Inputs(args, stdin)
        return _COMMANDS[args.command](args, inputs, stdout)
    except ParseError as e:
        stderr.write(f"parse error at {e.line}:{e.column}: {e.message}\n")
        return EXIT_PARSE
    except (ConstraintError, AlgebraError) as e:
        stderr.write(f"invalid constraint system: {e}\n")
        return EXIT_SYSTEM
    except CliError as e:
        stderr.write(f"error: {e}\n")
        return e.code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
