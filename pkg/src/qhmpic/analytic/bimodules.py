"""Twisted bimodule structures on sampled sections, partial automorphisms
recovered from left-isometric maps, and polar correction of fiber maps.

A :class:`BimoduleModel` puts a bimodule structure on the sampled space of a
line bundle using two grid translations lam, rho (acting on functions as
a -> a o tau):

    a . m = lam^{-1}(a) m        <m, n>_L = lam(m conj(n))
    m . a = m rho^{-1}(a)        <m, n>_R = rho(conj(m) n)

lam = rho = id is M^c itself; lam = rho = alpha is alpha(M) of a translation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from qhmpic.analytic.constants import MIN_PROBES, PROBE_GRAM_MIN
from qhmpic.analytic.grid import Grid, TwistedSection, check_compatible, roll_sites


class NotLeftIsometric(ValueError):
    pass


class DegenerateProbes(ValueError):
    pass


class SingularFiber(ValueError):
    pass


def _neg(steps: tuple[int, int]) -> tuple[int, int]:
    return (-steps[0], -steps[1])


@dataclass(frozen=True)
class BimoduleModel:
    left_shift: tuple[int, int] = (0, 0)
    right_shift: tuple[int, int] = (0, 0)

    def left_ip(self, m: np.ndarray, n: np.ndarray) -> np.ndarray:
        return roll_sites(m * np.conj(n), self.left_shift)

    def right_ip(self, m: np.ndarray, n: np.ndarray) -> np.ndarray:
        return roll_sites(np.conj(m) * n, self.right_shift)

    def left_act(self, a: np.ndarray, m: np.ndarray) -> np.ndarray:
        return roll_sites(a, _neg(self.left_shift)) * m

    def right_act(self, m: np.ndarray, a: np.ndarray) -> np.ndarray:
        # same operand order as left_act, so symmetric models agree bit for bit
        return roll_sites(a, _neg(self.right_shift)) * m

    def is_symmetric(self) -> bool:
        return self.left_shift == self.right_shift


POINTWISE = BimoduleModel()


def symmetrize(model: BimoduleModel) -> BimoduleModel:
    """M^s: keep the left structure, set m . a = a . m and <m0, m1>_R = <m1, m0>_L.

    The underlying vector space (the samples) is unchanged.
    """
    return BimoduleModel(model.left_shift, model.left_shift)


def compatibility_residual(model: BimoduleModel, m, n, p) -> float:
    """|<m, n>_L . p - m . <n, p>_R|, zero for any consistent model."""
    lhs = model.left_act(model.left_ip(m, n), p)
    rhs = model.right_act(m, model.right_ip(n, p))
    return float(np.max(np.abs(lhs - rhs)))


def symmetry_residual(model: BimoduleModel, m: np.ndarray, a: np.ndarray) -> float:
    """|a . m - m . a| for one test function a."""
    return float(np.max(np.abs(model.left_act(a, m) - model.right_act(m, a))))


def _values(m) -> np.ndarray:
    return m.values if isinstance(m, TwistedSection) else np.asarray(m)


@dataclass(eq=False)
class ThetaEstimate:
    """A partial automorphism estimated as a site map: theta(a)(s) = a(site_map[s]).

    Automorphisms of the sampled algebra C(grid) are exactly site permutations.
    Masked sites (site_map == -1) are outside the ideal seen by the probes.
    """

    grid: Grid
    site_map: np.ndarray
    masked: np.ndarray
    isometry_residual: float
    well_definedness: float
    multiplicativity: float

    def apply(self, a: np.ndarray) -> np.ndarray:
        flat = np.asarray(a).reshape(-1)
        out = np.full(flat.shape, np.nan + 0j)
        ok = self.site_map >= 0
        out[ok] = flat[self.site_map[ok]]
        return out.reshape(self.grid.shape)

    def is_injective(self) -> bool:
        used = self.site_map[self.site_map >= 0]
        return len(np.unique(used)) == len(used)

    def translation(self) -> tuple[int, int] | None:
        """(di, dj) if theta is composition with one grid translation on every unmasked site."""
        nx, ny = self.grid.shape
        src = np.flatnonzero(self.site_map >= 0)
        if len(src) == 0:
            return None
        dst = self.site_map[src]
        di = (dst // ny - src // ny) % nx
        dj = (dst % ny - src % ny) % ny
        if np.all(di == di[0]) and np.all(dj == dj[0]):
            return (int(di[0]), int(dj[0]))
        return None

    def report(self) -> dict[str, float]:
        return {
            "isometry": self.isometry_residual,
            "well_definedness": self.well_definedness,
            "multiplicativity": self.multiplicativity,
            "masked_fraction": float(np.mean(self.masked)),
        }


def extract_theta(
    phi: Callable[[np.ndarray], np.ndarray],
    probes: Sequence[tuple],
    source: BimoduleModel = POINTWISE,
    target: BimoduleModel = POINTWISE,
    isometry_tol: float = 1e-9,
    gram_min: float = PROBE_GRAM_MIN,
) -> ThetaEstimate:
    """Recover theta with theta(<phi m0, phi m1>_R^target) = <m0, m1>_R^source.

    ``phi`` acts on sample arrays and must preserve left inner products on
    the probes. Multiplicativity is checked in the form
    theta(<phi m1, phi m2>_R <phi m1', phi m2'>_R) = <m1, <m2, m1'>_L m2'>_R.
    """
    if len(probes) < MIN_PROBES:
        raise DegenerateProbes(f"need at least {MIN_PROBES} probe pairs, got {len(probes)}")
    grid = None
    pairs = []
    for m0, m1 in probes:
        if isinstance(m0, TwistedSection):
            check_compatible(m0, m1)
            grid = m0.grid
        a, b = _values(m0), _values(m1)
        pairs.append((a, b, phi(a), phi(b)))
    shape = pairs[0][0].shape
    if grid is None:
        grid = Grid(*shape)

    iso = 0.0
    for a, b, pa, pb in pairs:
        for x, y, px, py in ((a, b, pa, pb), (a, a, pa, pa), (b, b, pb, pb)):
            iso = max(iso, float(np.max(np.abs(target.left_ip(px, py) - source.left_ip(x, y)))))
    if iso > isometry_tol:
        raise NotLeftIsometric(f"map does not preserve left inner products (residual {iso:.3e})")

    u = np.stack([target.right_ip(pa, pb).reshape(-1) for _, _, pa, pb in pairs], axis=1)
    w = np.stack([source.right_ip(a, b).reshape(-1) for a, b, _, _ in pairs], axis=1)
    masked = np.sum(np.abs(w) ** 2, axis=1) < gram_min
    if masked.all():
        raise DegenerateProbes("every probe vanishes at every site; theta is undetermined")
    candidates = np.flatnonzero(np.sum(np.abs(u) ** 2, axis=1) >= gram_min)
    if len(candidates) == 0:
        raise DegenerateProbes("images of the probes vanish everywhere")

    def embed(z):
        return np.concatenate([z.real, z.imag], axis=1)

    tree = cKDTree(embed(u[candidates]))
    active = np.flatnonzero(~masked)
    _, nearest = tree.query(embed(w[active]))
    site_map = np.full(u.shape[0], -1, dtype=np.int64)
    site_map[active] = candidates[nearest]
    well = float(np.max(np.abs(u[site_map[active]] - w[active])))

    mult = 0.0
    for j, (aj, bj, _, _) in enumerate(pairs):
        for k, (ak, bk, _, _) in enumerate(pairs):
            inner = source.left_act(source.left_ip(bj, ak), bk)
            rhs = source.right_ip(aj, inner).reshape(-1)[active]
            lhs = (u[:, j] * u[:, k])[site_map[active]]
            mult = max(mult, float(np.max(np.abs(lhs - rhs))))

    return ThetaEstimate(grid, site_map, masked.reshape(shape), iso, well, mult)


def right_structure_residuals(
    phi: Callable[[np.ndarray], np.ndarray],
    probes: Sequence[tuple],
    functions: Sequence[np.ndarray],
    source: BimoduleModel = POINTWISE,
    target: BimoduleModel = POINTWISE,
) -> dict[str, float]:
    """How far a left-isometric map is from preserving the right inner product and the right action."""
    ip = 0.0
    act = 0.0
    for m0, m1 in probes:
        a, b = _values(m0), _values(m1)
        ip = max(ip, float(np.max(np.abs(target.right_ip(phi(a), phi(b)) - source.right_ip(a, b)))))
        for f in functions:
            f = _values(f)
            act = max(act, float(np.max(np.abs(phi(source.right_act(a, f)) - target.right_act(phi(a), f)))))
    return {"right_inner_product": ip, "right_action": act}


def fiber_left_ip(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """<f, g>_L = sum_i f_i conj(g_i) for sections of the free module A^2 (shape (..., 2))."""
    return np.sum(f * np.conj(g), axis=-1)


def apply_fiber_map(T: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...j->...i", T, f)


def polar_correct(T: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """S = T (T* T)^{-1/2}, computed per site with a Hermitian eigendecomposition."""
    T = np.asarray(T, dtype=complex)
    H = np.conj(np.swapaxes(T, -1, -2)) @ T
    evals, evecs = np.linalg.eigh(H)
    smallest = np.sqrt(np.clip(evals[..., 0], 0.0, None))
    if np.any(smallest <= tol):
        bad = np.unravel_index(int(np.argmin(smallest)), smallest.shape)
        raise SingularFiber(f"fiber map is singular at site {tuple(int(i) for i in bad)}")
    inv_sqrt = (evecs * (1.0 / np.sqrt(evals))[..., None, :]) @ np.conj(np.swapaxes(evecs, -1, -2))
    return T @ inv_sqrt


def left_isometry_residual(S: np.ndarray, f: np.ndarray, g: np.ndarray) -> float:
    """Max |<S f, S g>_L - <f, g>_L| over the grid."""
    lhs = fiber_left_ip(apply_fiber_map(S, f), apply_fiber_map(S, g))
    return float(np.max(np.abs(lhs - fiber_left_ip(f, g))))


__all__ = [
    "BimoduleModel",
    "DegenerateProbes",
    "NotLeftIsometric",
    "POINTWISE",
    "SingularFiber",
    "ThetaEstimate",
    "apply_fiber_map",
    "compatibility_residual",
    "extract_theta",
    "fiber_left_ip",
    "left_isometry_residual",
    "polar_correct",
    "right_structure_residuals",
    "symmetrize",
    "symmetry_residual",
]
