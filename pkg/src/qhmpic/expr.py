"""Symbolic bimodule expressions and their Picard normal forms.

Grammar (whitespace-insensitive)::

    expr  := term ("(x)" term)*
    term  := "M^" int
           | "A[" auto "]"
           | "~" term
           | "conj(" auto "," expr ")"
           | "(" expr ")"
    auto  := ("id" | "[a,b],[c,d]" | "[[a,b],[c,d]]") (";" "(" rat "," rat ")")?

Inside ``conj(...)`` the automorphism may also be wrapped as ``A[...]``.
``render`` output of :mod:`qhmpic.picard` is always valid input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from qhmpic.exact_algebra import (
    IDENTITY_MATRIX,
    ORIGIN,
    AffineAuto,
    MalformedRational,
    NonUnimodular,
    TorusPoint,
    UnimodularMatrix,
)
from qhmpic.picard import (
    PicElement,
    auto_bimodule,
    line_bundle,
    pic_conjugate,
    pic_dual,
    pic_tensor,
)


class ParseError(ValueError):
    """Base class for every error raised by :func:`parse`."""

    position: int = 0


class ExprSyntaxError(ParseError):
    def __init__(self, position: int, expected: list[str], found: str):
        self.position = position
        self.expected = list(expected)
        self.found = found
        super().__init__(
            f"syntax error at position {position}: expected {' or '.join(self.expected)}, found {found}"
        )


class ExprNonUnimodular(ParseError, NonUnimodular):
    def __init__(self, det: int, position: int):
        NonUnimodular.__init__(self, det, position)
        self.position = position


class ExprMalformedRational(ParseError, MalformedRational):
    def __init__(self, message: str, position: int):
        MalformedRational.__init__(self, f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class LineBundle:
    c: int


@dataclass(frozen=True)
class AutoBimodule:
    auto: AffineAuto


@dataclass(frozen=True)
class Dual:
    child: "ExprNode"


@dataclass(frozen=True)
class Conj:
    auto: AffineAuto
    child: "ExprNode"


@dataclass(frozen=True)
class Tensor:
    left: "ExprNode"
    right: "ExprNode"


ExprNode = Union[LineBundle, AutoBimodule, Dual, Conj, Tensor]


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<tensor>\(\s*x\s*\))"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_]+)"
    r"|(?P<punct>[\^\[\](),;/~+\-])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "int", "ident", "tensor", "punct", "eof"
    text: str
    pos: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(pos, ["a token"], repr(text[pos]))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def fail(self, expected: list[str]):
        raise ExprSyntaxError(self.tok.pos, expected, self.tok.describe())

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "ident", "tensor") and self.tok.text == text

    def expect(self, text: str) -> _Token:
        if not self.at(text):
            self.fail([repr(text)])
        tok = self.tok
        self.i += 1
        return tok

    def parse_int(self) -> int:
        sign = 1
        if self.at("-") or self.at("+"):
            sign = -1 if self.tok.text == "-" else 1
            self.i += 1
        if self.tok.kind != "int":
            self.fail(["an integer"])
        value = int(self.tok.text)
        self.i += 1
        return sign * value

    def parse_rational(self) -> Fraction:
        start = self.tok.pos
        num = self.parse_int()
        if self.at("/"):
            self.i += 1
            if self.tok.kind != "int":
                raise ExprMalformedRational("denominator must be a positive integer", self.tok.pos)
            den = int(self.tok.text)
            self.i += 1
            if den == 0:
                raise ExprMalformedRational("zero denominator", start)
            return Fraction(num, den)
        return Fraction(num)

    def parse_rows(self) -> list[list[int]]:
        rows = []
        for k in range(2):
            if k:
                self.expect(",")
            self.expect("[")
            a = self.parse_int()
            self.expect(",")
            b = self.parse_int()
            self.expect("]")
            rows.append([a, b])
        return rows

    def parse_auto_body(self) -> AffineAuto:
        start = self.tok.pos
        if self.at("id"):
            self.i += 1
            linear = IDENTITY_MATRIX
        elif self.at("["):
            if self.peek().kind == "punct" and self.peek().text == "[":
                self.i += 1
                rows = self.parse_rows()
                self.expect("]")
            else:
                rows = self.parse_rows()
            (a, b), (c, d) = rows
            det = a * d - b * c
            if det not in (1, -1):
                raise ExprNonUnimodular(det, start)
            linear = UnimodularMatrix(a, b, c, d)
        else:
            self.fail(["'id'", "a matrix"])
        shift = ORIGIN
        if self.at(";"):
            self.i += 1
            self.expect("(")
            x = self.parse_rational()
            self.expect(",")
            y = self.parse_rational()
            self.expect(")")
            shift = TorusPoint(x, y)
        return AffineAuto(linear, shift)

    def parse_conj_auto(self) -> AffineAuto:
        if self.at("A") and self.peek().text == "[":
            self.i += 2
            auto = self.parse_auto_body()
            self.expect("]")
            return auto
        return self.parse_auto_body()

    def parse_expr(self) -> ExprNode:
        node = self.parse_term()
        while self.tok.kind == "tensor":
            self.i += 1
            node = Tensor(node, self.parse_term())
        return node

    def parse_term(self) -> ExprNode:
        # prefix duals are consumed in a loop so long runs of '~' do not recurse
        duals = 0
        while self.at("~"):
            self.i += 1
            duals += 1
        node = self.parse_atom()
        for _ in range(duals):
            node = Dual(node)
        return node

    def parse_atom(self) -> ExprNode:
        if self.at("M"):
            self.i += 1
            self.expect("^")
            return LineBundle(self.parse_int())
        if self.at("A"):
            self.i += 1
            self.expect("[")
            auto = self.parse_auto_body()
            self.expect("]")
            return AutoBimodule(auto)
        if self.at("conj"):
            self.i += 1
            self.expect("(")
            auto = self.parse_conj_auto()
            self.expect(",")
            child = self.parse_expr()
            self.expect(")")
            return Conj(auto, child)
        if self.at("("):
            self.i += 1
            node = self.parse_expr()
            self.expect(")")
            return node
        self.fail(["'M^'", "'A['", "'~'", "'conj('", "'('"])


def parse(text: str) -> ExprNode:
    """Parse an expression; every failure is a :class:`ParseError` with a position."""
    parser = _Parser(text)
    try:
        node = parser.parse_expr()
    except RecursionError:
        raise ExprSyntaxError(parser.tok.pos, ["shallower nesting"], "too many nested terms") from None
    if parser.tok.kind != "eof":
        parser.fail(["'(x)'", "end of input"])
    return node


def normalize(e: ExprNode) -> PicElement:
    """Reduce an expression tree to its unique (twist, auto) normal form."""
    # explicit post-order walk: long tensor chains would overflow recursion
    stack: list[tuple[ExprNode, bool]] = [(e, False)]
    values: list[PicElement] = []
    while stack:
        node, done = stack.pop()
        if isinstance(node, LineBundle):
            values.append(line_bundle(node.c))
        elif isinstance(node, AutoBimodule):
            values.append(auto_bimodule(node.auto))
        elif not done:
            stack.append((node, True))
            if isinstance(node, Tensor):
                stack.append((node.right, False))
                stack.append((node.left, False))
            else:
                stack.append((node.child, False))
        elif isinstance(node, Tensor):
            right = values.pop()
            left = values.pop()
            values.append(pic_tensor(left, right))
        elif isinstance(node, Dual):
            values.append(pic_dual(values.pop()))
        elif isinstance(node, Conj):
            values.append(pic_conjugate(node.auto, values.pop()))
        else:
            raise TypeError(f"not an expression node: {node!r}")
    return values[0]


def evaluate(text: str) -> PicElement:
    return normalize(parse(text))
