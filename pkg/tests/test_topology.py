from fractions import Fraction

import numpy as np
import pytest

from qhmpic.analytic.grid import Grid, e
from qhmpic.analytic.topology import (
    AliasedPhase,
    GridIncompatibleAuto,
    ProjectionField,
    RankDeficientSite,
    VanishingSample,
    chern_number,
    chern_sum,
    frame_projection,
    frame_vector,
    transform_projection,
    winding_number,
)
from qhmpic.exact_algebra import AffineAuto

G = Grid.square(64)
J = AffineAuto.linear_map([[1, 0], [0, -1]])


def test_winding_examples():
    y = np.arange(1024) / 1024
    assert winding_number(np.ones(1024)) == 0
    for c in range(-5, 6):
        assert winding_number(e(-c * y)) == -c


def test_winding_stable_under_refinement():
    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    ks = np.arange(-3, 4)

    def loop(n):
        t = np.arange(n) / n
        return 4 * e(2 * t) + e(np.outer(t, ks)) @ coeffs

    assert winding_number(loop(256)) == winding_number(loop(512)) == winding_number(loop(1024)) == 2


def test_winding_errors():
    y = np.arange(16) / 16
    with pytest.raises(VanishingSample):
        winding_number(np.array([1, 0, 1j, -1]))
    with pytest.raises(AliasedPhase):
        winding_number(e(5 * y))


def test_frame_is_unit_and_twisted():
    y = G.y
    xi0 = frame_vector(2, np.array([0.0]), y)[0]
    xi1 = frame_vector(2, np.array([1.0]), y)[0]
    assert np.max(np.abs(xi1 - e(-2 * y)[:, None] * xi0)) < 1e-15
    xi = frame_vector(2, G.x, y)
    assert np.max(np.abs(np.sum(np.abs(xi) ** 2, axis=-1) - 1)) < 1e-14


def test_projection_algebra():
    p0 = frame_projection(0, G)
    assert p0.idempotency_residual() < 1e-12
    assert np.max(np.abs(p0.trace() - 1)) < 1e-14
    p = frame_projection(1, G)
    assert p.idempotency_residual() < 1e-12
    assert p.hermiticity_residual() == 0.0
    assert p.seam_residual() < 1e-14


@pytest.mark.parametrize("c", [-3, -2, -1, 0, 1, 2, 3])
def test_chern_of_frame(c):
    p = frame_projection(c, G)
    assert chern_number(p) == -c
    assert abs(chern_sum(p) + c) < 1e-3


def test_transform_projection():
    p = frame_projection(1, G)
    assert np.array_equal(transform_projection(AffineAuto(), p).values, p.values)
    assert chern_number(transform_projection(J, p)) == 1
    t = AffineAuto.translation(Fraction(1, 4), Fraction(3, 8))
    assert chern_number(transform_projection(t, p)) == -1
    shear = AffineAuto.linear_map([[1, 1], [0, 1]])
    assert chern_number(transform_projection(shear, frame_projection(2, G))) == -2


def test_transform_needs_grid_automorphism():
    with pytest.raises(GridIncompatibleAuto):
        transform_projection(AffineAuto.translation(Fraction(1, 3), 0), frame_projection(1, G))


def test_rank_deficient():
    p = frame_projection(1, G)
    vals = p.values.copy()
    vals[3, 4] = 0
    with pytest.raises(RankDeficientSite):
        chern_number(ProjectionField(G, vals))


def test_json_round_trip():
    p = frame_projection(1, Grid.square(8))
    back = ProjectionField.from_json(p.to_json())
    assert np.array_equal(back.values, p.values) and back.twist == 1
