"""Isomorphism classification of quantum Heisenberg manifolds D^c_{mu nu}.

D^c_{mu nu} is the crossed product of C(T^2) by M^c twisted by the
translation (x, y) -> (x + 2 mu, y + 2 nu). Two directions are available:

* sufficiency: a cp-certificate between the bimodules (which covers the
  GL_2(Z)-orbit hypothesis on (mu, nu)) proves isomorphism;
* obstruction: K_0(D^c) = Z^3 + Z_c separates different c.

Anything else is ``UNKNOWN``; no converse is known, so it must not be read
as non-isomorphism. Only rational parameters are decided.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from qhmpic.cp_calculus import CpCertificate, decide_cp
from qhmpic.exact_algebra import (
    AffineAuto,
    RationalLike,
    TorusPoint,
    as_rational,
    format_matrix,
    format_rational,
    mod1,
)
from qhmpic.orbit import DEFAULT_NODE_CAP, OrbitWitness, decide_orbit
from qhmpic.picard import PicElement


@dataclass(frozen=True)
class QhmSpec:
    c: int
    mu: Fraction
    nu: Fraction

    def __post_init__(self):
        if not isinstance(self.c, int) or isinstance(self.c, bool) or self.c < 1:
            raise ValueError(f"c must be a positive integer, got {self.c!r}")
        # D^c_{mu nu} depends on (mu, nu) only mod 1
        object.__setattr__(self, "mu", mod1(as_rational(self.mu)))
        object.__setattr__(self, "nu", mod1(as_rational(self.nu)))

    @classmethod
    def of(cls, c: int, mu: RationalLike, nu: RationalLike) -> QhmSpec:
        return cls(c, as_rational(mu), as_rational(nu))

    @property
    def parameters(self) -> TorusPoint:
        return TorusPoint(self.mu, self.nu)

    def to_json(self) -> dict:
        return {"c": self.c, "mu": format_rational(self.mu), "nu": format_rational(self.nu)}


@dataclass(frozen=True)
class KClass:
    free_rank: int
    torsion: int

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": self.torsion}


class VerdictKind(str, enum.Enum):
    ISOMORPHIC = "Isomorphic"
    NOT_ISOMORPHIC = "NotIsomorphic"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    k_classes: tuple[KClass, KClass]
    certificate: CpCertificate | None = None
    orbit_witness: OrbitWitness | None = None
    reason: str = ""

    @property
    def exit_code(self) -> int:
        return {VerdictKind.ISOMORPHIC: 0, VerdictKind.NOT_ISOMORPHIC: 1, VerdictKind.UNKNOWN: 2}[self.kind]

    def to_json(self) -> dict:
        w = self.orbit_witness
        return {
            "verdict": self.kind.value,
            "reason": self.reason,
            "k_class_1": self.k_classes[0].to_json(),
            "k_class_2": self.k_classes[1].to_json(),
            "orbit_witness": None if w is None else {"matrix": format_matrix(w.sigma), "path": list(w.path)},
            "certificate": None if self.certificate is None else self.certificate.to_json(),
        }


def bimodule_of(s: QhmSpec) -> PicElement:
    """M^c (x) A_{alpha_{mu nu}} with alpha the translation by (2 mu, 2 nu).

    The shift f(x, y) -> f(x, y + nu) turns the nu-dependent twist of X^c_nu
    into the plain M^c rule, so only the translation remembers nu.
    """
    return PicElement(s.c, AffineAuto.translation(2 * s.mu, 2 * s.nu))


def k_class(s: QhmSpec) -> KClass:
    return KClass(3, s.c)


def iso_check(s1: QhmSpec, s2: QhmSpec, node_cap: int = DEFAULT_NODE_CAP) -> Verdict:
    ks = (k_class(s1), k_class(s2))
    if ks[0] != ks[1]:
        return Verdict(VerdictKind.NOT_ISOMORPHIC, ks, reason="K_0 torsion differs")
    orbit = decide_orbit(s1.parameters, s2.parameters, node_cap)
    cp = decide_cp(bimodule_of(s1), bimodule_of(s2), node_cap)
    if cp.certificate is not None:
        reason = "parameters in the same GL(2,Z) orbit" if orbit.same_orbit else "bimodule-level cp-equivalence"
        return Verdict(VerdictKind.ISOMORPHIC, ks, cp.certificate, orbit.witness, reason)
    return Verdict(VerdictKind.UNKNOWN, ks, reason=f"no certificate ({cp.reason})")
