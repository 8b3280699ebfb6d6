"""Concrete sections of M^c and X^c_nu and the pointwise bimodule identities.

Actions of C(T^2) are pointwise multiplication and the inner products are
<f, g>_L = f conj(g), <f, g>_R = conj(f) g, so every identity checked here
is algebraic at each sample and its residual is pure rounding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from qhmpic.analytic.grid import (
    Grid,
    GridMismatch,
    TorusFunction,
    TwistedSection,
    TwistMismatch,
    check_compatible,
    e,
)

# periodization range; shifted bumps live in x in (-1, 3) so |n| <= 3 covers [0, 1]
_PERIOD_TERMS = range(-3, 4)


def bump(x):
    """Smooth bump supported in (-1, 2), equal to 1 at x = 1/2."""
    t = (2.0 * np.asarray(x, dtype=float) - 1.0) / 3.0
    inside = np.abs(t) < 1.0
    safe = np.where(inside, 1.0 - t * t, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)


def trig_profile(bandwidth: int, seed: int) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Seeded random trigonometric polynomial times a shifted :func:`bump`, as phi(x, y) on an outer grid.

    The bump offset is random too: with a centred bump every section of odd
    twist would vanish at (0, 1/2), so different seeds would share a zero.
    """
    if bandwidth < 1:
        raise ValueError("bandwidth must be >= 1")
    rng = np.random.default_rng(seed)
    size = 2 * bandwidth + 1
    coeffs = (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) / size
    offset = rng.uniform(0.0, 1.0)
    ks = np.arange(-bandwidth, bandwidth + 1)

    def phi(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ex = e(np.outer(x, ks))
        ey = e(np.outer(y, ks))
        return bump(x - offset)[:, None] * (ex @ coeffs @ ey.T)

    return phi


def periodized_section(c: int, grid: Grid, phi, nu: Fraction = Fraction(0)) -> TwistedSection:
    """f(x, y) = sum_n phi(x + n, y) e(n c (y - nu)), which satisfies the twist rule exactly."""
    y = grid.y
    shift = y - float(nu)

    def evaluate(x: np.ndarray) -> np.ndarray:
        total = np.zeros((len(x), len(y)), dtype=complex)
        for n in _PERIOD_TERMS:
            total += phi(x + n, y) * e(n * c * shift)[None, :]
        return total

    values = evaluate(grid.x)
    edge = evaluate(np.array([1.0]))[0]
    return TwistedSection(c, grid, values, edge, nu)


def random_smooth_section(
    c: int, grid: Grid, bandwidth: int = 3, seed: int = 0, nu: Fraction = Fraction(0)
) -> TwistedSection:
    """Seeded smooth section of M^c (X^c_nu for nu != 0), scaled to unit RMS."""
    s = periodized_section(c, grid, trig_profile(bandwidth, seed), nu)
    scale = 1.0 / np.sqrt(np.mean(np.abs(s.values) ** 2))
    return scale * s


def constant_section(grid: Grid, value: complex = 1.0) -> TwistedSection:
    """Constant section of the trivial module M^0."""
    values = np.full(grid.shape, value, dtype=complex)
    return TwistedSection(0, grid, values, values[0].copy())


def _edge_product(a, b):
    return None if a is None or b is None else a * b


def inner_left(f: TwistedSection, g: TwistedSection) -> TorusFunction:
    check_compatible(f, g)
    edge = _edge_product(f.edge, None if g.edge is None else np.conj(g.edge))
    return TorusFunction(f.grid, f.values * np.conj(g.values), edge)


def inner_right(f: TwistedSection, g: TwistedSection) -> TorusFunction:
    check_compatible(f, g)
    edge = _edge_product(None if f.edge is None else np.conj(f.edge), g.edge)
    return TorusFunction(f.grid, np.conj(f.values) * g.values, edge)


def _maxabs(a) -> float:
    return float(np.max(np.abs(a)))


def polarized_inner_left(f: TwistedSection, g: TwistedSection) -> np.ndarray:
    """(1/4) sum_k i^k |f + i^k g|^2, which should reproduce <f, g>_L."""
    check_compatible(f, g)
    total = np.zeros(f.grid.shape, dtype=complex)
    for k in range(4):
        w = 1j**k
        total += w * np.abs(f.values + w * g.values) ** 2
    return total / 4


def check_axioms(f: TwistedSection, g: TwistedSection, h: TwistedSection) -> dict[str, float]:
    """Max-norm residuals of the bimodule identities on three sections."""
    check_compatible(f, g)
    check_compatible(g, h)
    fg_left = inner_left(f, g).values
    gh_right = inner_right(g, h).values
    a = gh_right  # a test function for the symmetry check
    return {
        # <f, g>_L h = f <g, h>_R
        "compatibility": _maxabs(fg_left * h.values - f.values * gh_right),
        # <f, g>_L h = <h, g>_L f
        "left_inner_exchange": _maxabs(fg_left * h.values - inner_left(h, g).values * f.values),
        # a f = f a: both actions are pointwise multiplication
        "symmetric_action": _maxabs(a * f.values - f.values * a),
        "polarization": _maxabs(polarized_inner_left(f, g) - fg_left),
    }


def xc_iso(nu: Fraction, f: TwistedSection) -> TwistedSection:
    """f -> f~ with f~(x, y) = f(x, y + nu).

    Sends X^c_{nu0} to X^c_{nu0 - nu}; with nu0 = nu this is X^c_nu -> M^c.
    Exact on grid-aligned shifts (a row permutation).
    """
    nu = Fraction(nu)
    k = f.grid.y_steps(nu)
    values = np.roll(f.values, -k, axis=1)
    edge = None if f.edge is None else np.roll(f.edge, -k)
    return TwistedSection(f.twist, f.grid, values, edge, f.nu - nu)


def mult_map(f: TwistedSection, g: TwistedSection) -> TwistedSection:
    """M^c (x) M^d -> M^{c+d}, f (x) g -> f g."""
    if f.grid != g.grid:
        raise GridMismatch(f"grids differ: {f.grid} vs {g.grid}")
    if f.nu != g.nu:
        raise TwistMismatch("mult_map needs sections with the same nu offset")
    return TwistedSection(f.twist + g.twist, f.grid, f.values * g.values, _edge_product(f.edge, g.edge), f.nu)


def tensor_inner_residual(f: TwistedSection, g: TwistedSection, f2: TwistedSection, g2: TwistedSection) -> float:
    """|<fg, f2 g2>_L - <f <g, g2>_L, f2>_L| where the latter is the tensor-product inner product."""
    lhs = inner_left(mult_map(f, g), mult_map(f2, g2)).values
    rhs = f.values * inner_left(g, g2).values * np.conj(f2.values)
    return _maxabs(lhs - rhs)


def gram_matrix(sections: list[TwistedSection]) -> np.ndarray:
    """Scalar Gram matrix G[a, b] = grid mean of <f_a, f_b>_R."""
    n = len(sections)
    G = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            G[a, b] = np.mean(inner_right(sections[a], sections[b]).values)
    return G
