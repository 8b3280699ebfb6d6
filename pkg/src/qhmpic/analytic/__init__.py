"""Sampled sections, bimodule identities and integer invariants on torus grids."""

from qhmpic.analytic.bimodules import BimoduleModel, extract_theta, polar_correct, symmetrize
from qhmpic.analytic.grid import Grid, TorusFunction, TwistedSection
from qhmpic.analytic.sections import check_axioms, inner_left, inner_right, mult_map, random_smooth_section, xc_iso
from qhmpic.analytic.suite import run_suite
from qhmpic.analytic.topology import chern_number, frame_projection, transform_projection, winding_number

__all__ = [
    "BimoduleModel",
    "Grid",
    "TorusFunction",
    "TwistedSection",
    "check_axioms",
    "chern_number",
    "extract_theta",
    "frame_projection",
    "inner_left",
    "inner_right",
    "mult_map",
    "polar_correct",
    "random_smooth_section",
    "run_suite",
    "symmetrize",
    "transform_projection",
    "winding_number",
    "xc_iso",
]
