"""Exact Picard-group calculus over C(T^2) and the isomorphism classifier
for quantum Heisenberg manifolds, with a numerical verification lab."""

from qhmpic.exact_algebra import (
    AffineAuto,
    TorusPoint,
    UnimodularMatrix,
    apply,
    compose,
    invert,
)
from qhmpic.picard import PicElement, pic_conjugate, pic_dual, pic_identity, pic_tensor, render
from qhmpic.expr import normalize, parse
from qhmpic.orbit import OrbitWitness, enumerate_orbit, same_orbit, to_residue
from qhmpic.cp_calculus import CpCertificate, apply_move, cp_equivalent, verify_certificate
from qhmpic.classifier import KClass, QhmSpec, Verdict, bimodule_of, iso_check, k_class

__version__ = "0.1.0"

__all__ = [
    "AffineAuto",
    "CpCertificate",
    "KClass",
    "OrbitWitness",
    "PicElement",
    "QhmSpec",
    "TorusPoint",
    "UnimodularMatrix",
    "Verdict",
    "apply",
    "apply_move",
    "bimodule_of",
    "compose",
    "cp_equivalent",
    "enumerate_orbit",
    "invert",
    "iso_check",
    "k_class",
    "normalize",
    "parse",
    "pic_conjugate",
    "pic_dual",
    "pic_identity",
    "pic_tensor",
    "render",
    "same_orbit",
    "to_residue",
    "verify_certificate",
]
