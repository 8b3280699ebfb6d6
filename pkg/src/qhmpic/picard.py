"""The affine-parameterized Picard group of C(T^2).

Pic(C(T^2)) splits as Z x| Aut(C(T^2)): every class is M^c (x) A_theta for a
unique twist c and automorphism theta, and automorphisms act on twists by
the determinant of their linear part. Here Aut is restricted to the affine
group GL_2(Z) x| T^2, so a :class:`PicElement` is the exact pair
``(twist, auto)`` with the product

    (c1, t1) (c2, t2) = (c1 + det(t1) * c2, t1 o t2).
"""

from __future__ import annotations

from dataclasses import dataclass

from qhmpic.exact_algebra import (
    IDENTITY,
    AffineAuto,
    compose,
    format_matrix,
    format_point,
    invert,
)


@dataclass(frozen=True)
class PicElement:
    twist: int
    auto: AffineAuto = IDENTITY

    def __post_init__(self):
        if not isinstance(self.twist, int) or isinstance(self.twist, bool):
            raise TypeError("twist must be an int")

    def __mul__(self, other: PicElement) -> PicElement:
        return pic_tensor(self, other)

    def __str__(self) -> str:
        return render(self)


def pic_identity() -> PicElement:
    return PicElement(0, IDENTITY)


def line_bundle(c: int) -> PicElement:
    return PicElement(c, IDENTITY)


def auto_bimodule(theta: AffineAuto) -> PicElement:
    return PicElement(0, theta)


def pic_tensor(p: PicElement, q: PicElement) -> PicElement:
    return PicElement(p.twist + p.auto.det * q.twist, compose(p.auto, q.auto))


def pic_dual(p: PicElement) -> PicElement:
    """Group inverse; this is the class of the dual bimodule."""
    return PicElement(-p.auto.det * p.twist, invert(p.auto))


def pic_conjugate(alpha: AffineAuto, p: PicElement) -> PicElement:
    """alpha(M) = A_alpha (x) M (x) A_{alpha^-1}."""
    return PicElement(alpha.det * p.twist, compose(compose(alpha, p.auto), invert(alpha)))


def render_auto(theta: AffineAuto) -> str:
    """Body of ``A[...]``: ``id`` or the matrix rows, then ``;(x,y)`` if shifted."""
    if theta.linear.is_identity():
        head = "id"
    else:
        # the outer brackets of the matrix are supplied by A[...]
        head = format_matrix(theta.linear)[1:-1]
    if theta.shift.is_zero():
        return head
    return f"{head};{format_point(theta.shift)}"


def render(p: PicElement) -> str:
    """Canonical text ``M^<c> (x) A[<auto>]``; valid parser input."""
    return f"M^{p.twist} (x) A[{render_auto(p.auto)}]"
