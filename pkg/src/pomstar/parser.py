"""LL(1) parser for operator expressions.

Grammar::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" INT)?
    atom    := INT | "i" | "hbar" | GEN | "(" expr ")"
             | ("comm" | "sym") "(" expr "," expr ")"

``GEN`` is ``q<k>``, ``p<k>``, ``th<k>`` or ``pth<k>`` with ``k >= 1``; ``*``
is the noncommutative operator product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import GeneratorSet, OperatorPoly, mul, scommutator, ssym
from .scalar import GaussianRational

__all__ = [
    "ParseError",
    "Num",
    "Imag",
    "Hbar",
    "Gen",
    "Neg",
    "BinOp",
    "Pow",
    "Bracket",
    "parse",
    "evaluate",
    "parse_operator",
    "evaluate_symbol",
    "split_top_level",
    "odd_indices",
    "max_index",
]


class ParseError(ValueError):
    """Lexical, syntax or semantic error with a 1-based source position."""

    def __init__(self, message: str, line: int = 1, column: int = 1, kind: str = "syntax"):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.kind = kind


@dataclass(frozen=True)
class Num:
    value: int
    pos: tuple = (1, 1)


@dataclass(frozen=True)
class Imag:
    pos: tuple = (1, 1)


@dataclass(frozen=True)
class Hbar:
    pos: tuple = (1, 1)


@dataclass(frozen=True)
class Gen:
    kind: str  # q, p, th or pth
    index: int
    pos: tuple = (1, 1)

    @property
    def odd(self) -> bool:
        return self.kind in ("th", "pth")


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: tuple = (1, 1)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: tuple = (1, 1)


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    pos: tuple = (1, 1)


@dataclass(frozen=True)
class Bracket:
    kind: str  # comm or sym
    left: object
    right: object
    pos: tuple = (1, 1)


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),])"
)
_GEN = re.compile(r"(pth|th|q|p)(\d+)$")
_KEYWORDS = ("i", "hbar", "comm", "sym")


def _tokenize(src: str):
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col, "lexical")
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            for k, ch in enumerate(text):
                if ch == "\n":
                    line += 1
                    line_start = pos + k + 1
        elif kind == "name":
            if text in _KEYWORDS:
                tokens.append((text, text, (line, col)))
            else:
                g = _GEN.match(text)
                if g is None:
                    raise ParseError(f"unknown generator {text!r}", line, col, "unknown_generator")
                index = int(g.group(2))
                if index < 1:
                    raise ParseError(f"generator index must be >= 1 in {text!r}", line, col, "unknown_generator")
                tokens.append(("gen", (g.group(1), index), (line, col)))
        else:
            tokens.append((kind if kind == "int" else text, text, (line, col)))
        pos = m.end()
    tokens.append(("eof", None, (line, pos - line_start + 1)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.k = 0

    @property
    def tok(self):
        return self.tokens[self.k]

    def advance(self):
        t = self.tokens[self.k]
        self.k += 1
        return t

    def expect(self, kind: str):
        t = self.tok
        if t[0] != kind:
            found = "end of input" if t[0] == "eof" else repr(t[1])
            raise ParseError(f"expected {kind!r}, found {found}", *t[2])
        return self.advance()

    def expr(self):
        node = self.term()
        while self.tok[0] in ("+", "-"):
            op, _, pos = self.advance()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.unary()
        while self.tok[0] in ("*", "/"):
            op, _, pos = self.advance()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self):
        if self.tok[0] == "-":
            _, _, pos = self.advance()
            return Neg(self.unary(), pos)
        if self.tok[0] == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] != "^":
            return base
        _, _, pos = self.advance()
        exp_tok = self.expect("int")
        e = int(exp_tok[1])
        if isinstance(base, Gen) and base.odd and e > 1:
            raise ParseError(f"odd generator {base.kind}{base.index} raised to power {e} > 1", *pos, kind="odd_power")
        return Pow(base, e, pos)

    def atom(self):
        kind, value, pos = self.tok
        if kind == "int":
            self.advance()
            return Num(int(value), pos)
        if kind == "i":
            self.advance()
            return Imag(pos)
        if kind == "hbar":
            self.advance()
            return Hbar(pos)
        if kind == "gen":
            self.advance()
            return Gen(value[0], value[1], pos)
        if kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind in ("comm", "sym"):
            self.advance()
            self.expect("(")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return Bracket(kind, left, right, pos)
        found = "end of input" if kind == "eof" else repr(value)
        raise ParseError(f"unexpected {found}", *pos)


def parse(src: str):
    """Parse ``src`` into an AST; raises :class:`ParseError`."""
    p = _Parser(src)
    node = p.expr()
    if p.tok[0] != "eof":
        raise ParseError(f"unexpected {p.tok[1]!r}", *p.tok[2])
    return node


def _walk(node):
    yield node
    for attr in ("operand", "left", "right", "base"):
        child = getattr(node, attr, None)
        if child is not None:
            yield from _walk(child)


def odd_indices(node) -> set[int]:
    """Pair indices written with ``th``/``pth`` tokens."""
    return {n.index for n in _walk(node) if isinstance(n, Gen) and n.odd}


def max_index(node) -> int:
    return max((n.index for n in _walk(node) if isinstance(n, Gen)), default=0)


def evaluate(node, gens: GeneratorSet) -> OperatorPoly:
    """Evaluate an AST over ``gens``; checks generator names against parities."""
    if isinstance(node, Num):
        return OperatorPoly.constant(gens, node.value)
    if isinstance(node, Imag):
        return OperatorPoly.constant(gens, GaussianRational(0, 1))
    if isinstance(node, Hbar):
        return OperatorPoly.constant(gens, 1, 1)
    if isinstance(node, Gen):
        if node.index > gens.n:
            raise ParseError(
                f"unknown generator {node.kind}{node.index}: only {gens.n} pairs", *node.pos, kind="unknown_generator"
            )
        odd = bool(gens.parities[node.index - 1])
        if odd != node.odd:
            want = ("th", "pth") if odd else ("q", "p")
            raise ParseError(
                f"pair {node.index} is {'odd' if odd else 'even'}; write {want[0]}{node.index}/{want[1]}{node.index}",
                *node.pos,
                kind="unknown_generator",
            )
        kind = "position" if node.kind in ("q", "th") else "momentum"
        return OperatorPoly.generator(gens, kind, node.index)
    if isinstance(node, Neg):
        return -evaluate(node.operand, gens)
    if isinstance(node, Pow):
        return evaluate(node.base, gens) ** node.exponent
    if isinstance(node, Bracket):
        a, b = evaluate(node.left, gens), evaluate(node.right, gens)
        return scommutator(a, b) if node.kind == "comm" else ssym(a, b)
    if isinstance(node, BinOp):
        a, b = evaluate(node.left, gens), evaluate(node.right, gens)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return mul(a, b)
        if not (b.is_scalar() and b.hbar_free()) or b.is_zero():
            raise ParseError("division is only by nonzero numbers", *node.pos, kind="division")
        return a.scale(GaussianRational(1) / b.terms[((0,) * (2 * gens.n), 0)])
    raise TypeError(f"not an AST node: {node!r}")


def parse_operator(src: str, gens: GeneratorSet) -> OperatorPoly:
    return evaluate(parse(src), gens)


def evaluate_symbol(node, gens: GeneratorSet):
    """Evaluate an AST as a commutative phase-space symbol."""
    from .classical import ClassicalSymbol

    if isinstance(node, Bracket):
        raise ParseError(f"{node.kind}() is not defined for classical symbols", *node.pos, kind="syntax")
    if isinstance(node, (Num, Imag, Hbar, Gen)):
        return ClassicalSymbol.from_operator(evaluate(node, gens))
    if isinstance(node, Neg):
        return -evaluate_symbol(node.operand, gens)
    if isinstance(node, Pow):
        base = evaluate_symbol(node.base, gens)
        out = ClassicalSymbol.constant(gens, 1)
        for _ in range(node.exponent):
            out = out * base
        return out
    if isinstance(node, BinOp):
        a, b = evaluate_symbol(node.left, gens), evaluate_symbol(node.right, gens)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        const = ((0,) * (2 * gens.n), 0)
        if set(b.terms) != {const}:
            raise ParseError("division is only by nonzero numbers", *node.pos, kind="division")
        return a.scale(GaussianRational(1) / b.terms[const])
    raise TypeError(f"not an AST node: {node!r}")


def split_top_level(src: str) -> list[str]:
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in src:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (x.strip() for x in parts) if p]
