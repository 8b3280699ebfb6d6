"""Seeded end-to-end run of the numerical checks, as one JSON-ready report."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from qhmpic.analytic.bimodules import (
    POINTWISE,
    BimoduleModel,
    extract_theta,
    left_isometry_residual,
    polar_correct,
)
from qhmpic.analytic.grid import Grid, roll_sites
from qhmpic.analytic.sections import (
    check_axioms,
    inner_left,
    mult_map,
    random_smooth_section,
    tensor_inner_residual,
    xc_iso,
)
from qhmpic.analytic.topology import chern_number, frame_projection, transform_projection, winding_number
from qhmpic.exact_algebra import AffineAuto


def random_fiber_maps(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    """Invertible 2x2 fields U diag(s) V* with singular values in [1/4, 4]."""

    def unitary():
        z = rng.standard_normal(shape + (2, 2)) + 1j * rng.standard_normal(shape + (2, 2))
        q, r = np.linalg.qr(z)
        d = np.diagonal(r, axis1=-2, axis2=-1)
        return q * (d / np.abs(d))[..., None, :]

    s = np.exp(rng.uniform(np.log(0.25), np.log(4.0), shape + (2,)))
    return unitary() * s[..., None, :] @ np.conj(np.swapaxes(unitary(), -1, -2))


def grid_shift_map(steps: tuple[int, int]):
    """f -> f o (x + di/nx, y + dj/ny) on sample arrays, with the target model that makes it left-isometric."""
    steps = (int(steps[0]), int(steps[1]))

    def phi(a: np.ndarray) -> np.ndarray:
        return roll_sites(a, steps)

    return phi, BimoduleModel(left_shift=(-steps[0], -steps[1]))


def y_shift_map(steps: int):
    return grid_shift_map((0, steps))


def run_suite(c: int, n: int, seed: int) -> dict:
    grid = Grid.square(n)
    f, g, h = (random_smooth_section(c, grid, 3, seed + k) for k in range(3))
    residuals: dict[str, float] = dict(check_axioms(f, g, h))
    residuals["seam_twist_rule"] = max(s.seam_residual() for s in (f, g, h))
    residuals["inner_left_periodicity"] = inner_left(f, g).seam_residual()

    if n % 4 == 0:
        nu = Fraction(1, 4)
        fx = random_smooth_section(c, grid, 3, seed + 3, nu)
        gx = random_smooth_section(c, grid, 3, seed + 4, nu)
        ft, gt = xc_iso(nu, fx), xc_iso(nu, gx)
        k = grid.y_steps(nu)
        residuals["xc_iso_seam"] = ft.seam_residual()
        residuals["xc_iso_inner_left"] = float(
            np.max(np.abs(inner_left(ft, gt).values - np.roll(inner_left(fx, gx).values, -k, axis=1)))
        )

    d1, d2 = (random_smooth_section(1, grid, 3, seed + 5 + k) for k in range(2))
    residuals["mult_map_seam"] = mult_map(f, d1).seam_residual()
    residuals["mult_map_tensor_inner"] = tensor_inner_residual(f, d1, g, d2)

    rng = np.random.default_rng(seed)
    T = random_fiber_maps(grid.shape, rng)
    S = polar_correct(T)
    u = rng.standard_normal(grid.shape + (2,)) + 1j * rng.standard_normal(grid.shape + (2,))
    v = rng.standard_normal(grid.shape + (2,)) + 1j * rng.standard_normal(grid.shape + (2,))
    residuals["polar_left_isometry"] = left_isometry_residual(S, u, v)

    probes = [(random_smooth_section(c, grid, 3, seed + 10 + 2 * k), random_smooth_section(c, grid, 3, seed + 11 + 2 * k))
              for k in range(3)]
    steps = n // 8
    phi, target = y_shift_map(steps)
    theta = extract_theta(phi, probes, POINTWISE, target)
    residuals["theta_well_definedness"] = theta.well_definedness
    residuals["theta_multiplicativity"] = theta.multiplicativity

    p = frame_projection(c, grid)
    integers = {
        "winding_transition": winding_number(f.transition_phase()),
        "chern_frame": chern_number(p),
        "chern_reflected": chern_number(transform_projection(AffineAuto.linear_map([[1, 0], [0, -1]]), p)),
        "theta_shift_dj": None if theta.translation() is None else theta.translation()[1],
    }
    expected = {
        "winding_transition": -c,
        "chern_frame": -c,
        "chern_reflected": c,
        "theta_shift_dj": (-steps) % n,
    }
    return {
        "parameters": {"c": c, "grid": n, "seed": seed},
        "residuals": residuals,
        "integers": integers,
        "expected_integers": expected,
    }


def suite_passes(report: dict, tol: float = 1e-9) -> bool:
    ok = all(v < tol for v in report["residuals"].values())
    return ok and report["integers"] == report["expected_integers"]
