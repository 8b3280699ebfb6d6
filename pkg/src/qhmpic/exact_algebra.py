"""Exact arithmetic on the torus T^2 = R^2/Z^2 and its affine automorphisms.

Rationals are :class:`fractions.Fraction`. Points are kept canonical in
[0, 1)^2 and every structure compares by value, so ``==`` is exact equality
of canonical forms.

An :class:`AffineAuto` stores the point map ``h(p) = A p + v (mod 1)``. The
induced automorphism of C(T^2) is ``f -> f o h^{-1}``, which makes
``h -> alpha_h`` a covariant homomorphism; all group laws here are stated on
point maps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction, str]


class MalformedRational(ValueError):
    """Raised when a rational literal cannot be read."""


class NonUnimodular(ValueError):
    """Raised when an integer matrix has determinant other than +1 or -1."""

    def __init__(self, det: int, position: int | None = None):
        self.det = det
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"matrix is not unimodular (det = {det}){where}")


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str) -> Fraction:
    """Read ``"p"`` or ``"p/q"`` with q > 0."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise MalformedRational(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise MalformedRational(f"zero denominator in {text!r}")
    return Fraction(num, den)


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def mod1(r: Fraction) -> Fraction:
    """Canonical representative of r in [0, 1)."""
    return r - (r.numerator // r.denominator)


@dataclass(frozen=True)
class TorusPoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", mod1(as_rational(self.x)))
        object.__setattr__(self, "y", mod1(as_rational(self.y)))

    @classmethod
    def of(cls, x: RationalLike, y: RationalLike) -> TorusPoint:
        return cls(as_rational(x), as_rational(y))

    def __neg__(self) -> TorusPoint:
        return TorusPoint(-self.x, -self.y)

    def __add__(self, other: TorusPoint) -> TorusPoint:
        return TorusPoint(self.x + other.x, self.y + other.y)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __str__(self) -> str:
        return format_point(self)


ORIGIN = TorusPoint(Fraction(0), Fraction(0))


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer 2x2 matrix [[a, b], [c, d]] with ad - bc = +-1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise TypeError(f"matrix entry {name} must be an int")
        det = self.a * self.d - self.b * self.c
        if det not in (1, -1):
            raise NonUnimodular(det)

    @classmethod
    def from_rows(cls, rows) -> UnimodularMatrix:
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: UnimodularMatrix) -> UnimodularMatrix:
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> UnimodularMatrix:
        # adjugate / det, exact because det = +-1
        s = self.det
        return UnimodularMatrix(s * self.d, -s * self.b, -s * self.c, s * self.a)

    def act(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        return self.a * x + self.b * y, self.c * x + self.d * y

    def act_mod(self, u: int, v: int, q: int) -> tuple[int, int]:
        return (self.a * u + self.b * v) % q, (self.c * u + self.d * v) % q

    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)

    def __str__(self) -> str:
        return format_matrix(self)


IDENTITY_MATRIX = UnimodularMatrix(1, 0, 0, 1)
SWAP = UnimodularMatrix(0, 1, 1, 0)
# orientation-reversing reflection y -> -y
REFLECT = UnimodularMatrix(1, 0, 0, -1)


@dataclass(frozen=True)
class AffineAuto:
    """Point map p -> linear @ p + shift (mod 1)."""

    linear: UnimodularMatrix = IDENTITY_MATRIX
    shift: TorusPoint = ORIGIN

    @classmethod
    def translation(cls, x: RationalLike, y: RationalLike) -> AffineAuto:
        return cls(IDENTITY_MATRIX, TorusPoint.of(x, y))

    @classmethod
    def linear_map(cls, rows) -> AffineAuto:
        return cls(UnimodularMatrix.from_rows(rows), ORIGIN)

    @property
    def det(self) -> int:
        return self.linear.det

    def is_identity(self) -> bool:
        return self.linear.is_identity() and self.shift.is_zero()

    def is_translation(self) -> bool:
        return self.linear.is_identity()

    def __str__(self) -> str:
        return f"{format_matrix(self.linear)};{format_point(self.shift)}"


IDENTITY = AffineAuto()


def compose(g: AffineAuto, h: AffineAuto) -> AffineAuto:
    """The map g o h, i.e. p -> g(h(p))."""
    x, y = g.linear.act(h.shift.x, h.shift.y)
    return AffineAuto(g.linear @ h.linear, TorusPoint(x + g.shift.x, y + g.shift.y))


def invert(h: AffineAuto) -> AffineAuto:
    inv = h.linear.inverse()
    x, y = inv.act(h.shift.x, h.shift.y)
    return AffineAuto(inv, TorusPoint(-x, -y))


def apply(h: AffineAuto, p: TorusPoint) -> TorusPoint:
    x, y = h.linear.act(p.x, p.y)
    return TorusPoint(x + h.shift.x, y + h.shift.y)


def format_matrix(m: UnimodularMatrix) -> str:
    return f"[[{m.a},{m.b}],[{m.c},{m.d}]]"


def format_point(p: TorusPoint) -> str:
    return f"({format_rational(p.x)},{format_rational(p.y)})"


_INT = r"\s*([+-]?\d+)\s*"
_MATRIX_RE = re.compile(rf"^\s*\[\s*\[{_INT},{_INT}\]\s*,\s*\[{_INT},{_INT}\]\s*\]\s*$")


def parse_matrix(text: str) -> UnimodularMatrix:
    m = _MATRIX_RE.match(text)
    if m is None:
        raise ValueError(f"malformed matrix {text!r}; expected [[a,b],[c,d]]")
    a, b, c, d = (int(g) for g in m.groups())
    return UnimodularMatrix(a, b, c, d)


def parse_point(text: str) -> TorusPoint:
    """Read ``"(p/q,r/s)"``; the parentheses are optional."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = body.split(",")
    if len(parts) != 2:
        raise MalformedRational(f"malformed point {text!r}; expected (x,y)")
    return TorusPoint(parse_rational(parts[0]), parse_rational(parts[1]))
