"""Line-bundle projections over T^2 and integer invariants of sampled data.

``frame_projection(c)`` builds a rank-one projection field p = conj(xi) xi^T
from a two-section frame of M^c; ``chern_number`` recovers the twist with the
lattice field-strength method, ``winding_number`` does the same for a
transition function on the circle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from qhmpic.analytic.constants import CHERN_ORIENTATION, INTEGER_TOL
from qhmpic.analytic.grid import Grid, _decode, _encode, e
from qhmpic.exact_algebra import AffineAuto, invert


class VanishingSample(ValueError):
    pass


class AliasedPhase(ValueError):
    pass


class RankDeficientSite(ValueError):
    pass


class PlaquettePhaseOverflow(ValueError):
    pass


class GridIncompatibleAuto(ValueError):
    pass


@dataclass(eq=False)
class ProjectionField:
    grid: Grid
    values: np.ndarray  # (nx, ny, 2, 2)
    twist: int | None = None
    edge: np.ndarray | None = None  # (ny, 2, 2) samples at x = 1

    def idempotency_residual(self) -> float:
        return float(np.max(np.abs(self.values @ self.values - self.values)))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.values - np.conj(np.swapaxes(self.values, -1, -2)))))

    def trace(self) -> np.ndarray:
        return np.trace(self.values, axis1=-2, axis2=-1)

    def seam_residual(self) -> float:
        if self.edge is None:
            return 0.0
        return float(np.max(np.abs(self.edge - self.values[0])))

    def to_json(self) -> dict:
        return {
            "twist": self.twist,
            "nx": self.grid.nx,
            "ny": self.grid.ny,
            "fiber": 2,
            "values": _encode(self.values),
        }

    @classmethod
    def from_json(cls, data: dict) -> ProjectionField:
        grid = Grid(data["nx"], data["ny"])
        return cls(grid, _decode(data["values"], grid.shape + (2, 2)), data.get("twist"))


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


# ramp knots: 0 on [0, a], 1/2 on [0.4, 0.6], 1 on [b, 1]
_RAMP_A, _RAMP_B = 0.05, 0.95


def ramp(x):
    """Quintic smoothstep ramp with exact plateaus at 0, 1/2 and 1."""
    x = np.asarray(x, dtype=float)
    rise = 0.5 * _smoothstep((x - _RAMP_A) / (0.4 - _RAMP_A))
    fall = 0.5 * _smoothstep((x - 0.6) / (_RAMP_B - 0.6))
    return np.where(x <= 0.5, rise, 0.5 + fall)


def frame_vector(c: int, x, y) -> np.ndarray:
    """The frame xi = (xi_1, xi_2) of M^c on [0, 1] x [0, 1); shape (len(x), len(y), 2).

    |xi|^2 = 1 and xi(1, y) = e(-c y) xi(0, y). Both branches of xi_2 vanish
    on [0.4, 0.6], so the piecewise definition is smooth.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = ramp(x)[:, None]
    xi1 = np.broadcast_to(np.sin(np.pi * r), (len(x), len(y))).astype(complex)
    cos = np.cos(np.pi * r)
    xi2 = np.where(x[:, None] <= 0.5, cos + 0j, -cos * e(-c * y)[None, :])
    return np.stack([xi1, xi2], axis=-1)


def _outer(xi: np.ndarray) -> np.ndarray:
    p = np.conj(xi)[..., :, None] * xi[..., None, :]
    # averaging with the adjoint makes p exactly Hermitian in floating point
    return (p + np.conj(np.swapaxes(p, -1, -2))) / 2


def frame_projection(c: int, grid: Grid) -> ProjectionField:
    """p_ij = conj(xi_i) xi_j, a rank-one projection field with periodic entries."""
    xi = frame_vector(c, grid.x, grid.y)
    edge = _outer(frame_vector(c, np.array([1.0]), grid.y))[0]
    return ProjectionField(grid, _outer(xi), c, edge)


def _checked_integer(value: float, what: str) -> int:
    n = int(np.rint(value))
    if abs(value - n) >= INTEGER_TOL:
        raise AliasedPhase(f"{what} {value:.6f} is not within {INTEGER_TOL} of an integer")
    return n


def winding_sum(u: np.ndarray, max_step: float = np.pi / 2) -> float:
    """(1/2 pi) times the sum of principal phase increments around the closed loop u."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    mag = np.abs(u)
    if mag.min() <= 1e-12 * max(mag.max(), 1e-300):
        raise VanishingSample(f"sample {int(np.argmin(mag))} vanishes")
    steps = np.angle(np.roll(u, -1) / u)
    if np.max(np.abs(steps)) > max_step:
        raise AliasedPhase(f"phase step {np.max(np.abs(steps)):.3f} exceeds {max_step:.3f}; refine the grid")
    return float(np.sum(steps)) / (2 * np.pi)


def winding_number(u: np.ndarray, max_step: float = np.pi / 2) -> int:
    """Winding number of a nonvanishing sampled loop on the circle."""
    return _checked_integer(winding_sum(u, max_step), "winding")


def range_vectors(p: ProjectionField) -> np.ndarray:
    """Unit vector spanning the range of p at each site (arbitrary phase)."""
    w, v = np.linalg.eigh(p.values)
    if np.any(w[..., -1] < 0.5) or np.any(np.abs(w[..., 0]) > 0.5):
        bad = np.argwhere((w[..., -1] < 0.5) | (np.abs(w[..., 0]) > 0.5))[0]
        raise RankDeficientSite(f"projection is not rank one at site {tuple(int(i) for i in bad)}")
    return v[..., :, -1]


def _link(v: np.ndarray, axis: int) -> np.ndarray:
    overlap = np.sum(np.conj(v) * np.roll(v, -1, axis=axis), axis=-1)
    mag = np.abs(overlap)
    if mag.min() < 1e-6:
        raise PlaquettePhaseOverflow("neighbouring fibers are nearly orthogonal; refine the grid")
    return overlap / mag


def field_strength(p: ProjectionField) -> np.ndarray:
    """Plaquette phases F = arg(U_x(s) U_y(s+x) conj(U_x(s+y)) conj(U_y(s))) in (-pi, pi]."""
    v = range_vectors(p)
    ux = _link(v, 0)
    uy = _link(v, 1)
    loop = ux * np.roll(uy, -1, axis=0) * np.conj(np.roll(ux, -1, axis=1)) * np.conj(uy)
    return np.angle(loop)


def chern_sum(p: ProjectionField, max_plaquette: float = np.pi / 2) -> float:
    F = field_strength(p)
    if np.max(np.abs(F)) > max_plaquette:
        raise PlaquettePhaseOverflow(f"plaquette phase {np.max(np.abs(F)):.3f} too large; refine the grid")
    # numpy sums a contiguous float array pairwise in a fixed order
    return CHERN_ORIENTATION * float(np.sum(np.ascontiguousarray(F).reshape(-1))) / (2 * np.pi)


def chern_number(p: ProjectionField, max_plaquette: float = np.pi / 2) -> int:
    return _checked_integer(chern_sum(p, max_plaquette), "Chern sum")


def _site_index_map(alpha: AffineAuto, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays (I, J) so that the site (i, j) maps to (I[i, j], J[i, j]) under alpha."""
    nx, ny = grid.shape
    m = alpha.linear
    bx = Fraction(m.b * nx, ny)
    cy = Fraction(m.c * ny, nx)
    sx = alpha.shift.x * nx
    sy = alpha.shift.y * ny
    if any(f.denominator != 1 for f in (bx, cy, sx, sy)):
        raise GridIncompatibleAuto(f"{alpha} does not map the {nx}x{ny} grid to itself")
    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    I = (m.a * i + int(bx) * j + int(sx)) % nx
    J = (int(cy) * i + m.d * j + int(sy)) % ny
    return I, J


def transform_projection(alpha: AffineAuto, p: ProjectionField) -> ProjectionField:
    """(alpha . p)(s) = p(alpha^{-1}(s)) for grid-preserving affine alpha."""
    I, J = _site_index_map(invert(alpha), p.grid)
    twist = None if p.twist is None else alpha.det * p.twist
    return ProjectionField(p.grid, p.values[I, J], twist)
