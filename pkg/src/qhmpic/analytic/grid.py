"""Sampled functions and twisted sections on the fundamental domain [0,1)^2.

A :class:`TwistedSection` of M^c (or of X^c_nu) stores samples at
x_i = i/nx, y_j = j/ny and, separately, the samples at x = 1 produced by the
constructor. The seam rule f(1, y) = e(-c(y - nu)) f(0, y) is therefore a
checkable property rather than something enforced by wrapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from qhmpic.analytic.constants import MIN_GRID
from qhmpic.exact_algebra import format_rational, parse_rational


class TwistMismatch(ValueError):
    pass


class GridMismatch(ValueError):
    pass


class MisalignedShift(ValueError):
    pass


def e(t):
    """e(t) = exp(2 pi i t)."""
    return np.exp(2j * np.pi * np.asarray(t))


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < MIN_GRID or self.ny < MIN_GRID:
            raise ValueError(f"grid must be at least {MIN_GRID}x{MIN_GRID}, got {self.nx}x{self.ny}")

    @classmethod
    def square(cls, n: int) -> Grid:
        return cls(n, n)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) / self.nx

    @property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def refined(self) -> Grid:
        return Grid(2 * self.nx, 2 * self.ny)

    def y_steps(self, shift: Fraction) -> int:
        """Number of grid rows equal to a y-shift; the shift must be grid-aligned."""
        k = Fraction(shift) * self.ny
        if k.denominator != 1:
            raise MisalignedShift(f"shift {shift} is not a multiple of 1/{self.ny}")
        return int(k) % self.ny


def roll_sites(a: np.ndarray, steps: tuple[int, int]) -> np.ndarray:
    """Composition with a grid translation: out[i, j] = a[i + di, j + dj]."""
    di, dj = steps
    if di == 0 and dj == 0:
        return a
    return np.roll(a, (-di, -dj), axis=(0, 1))


def _encode(values: np.ndarray) -> list[list[float]]:
    flat = np.ascontiguousarray(values).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _decode(pairs, shape) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(shape)


@dataclass(eq=False)
class TorusFunction:
    """Samples of a function on T^2; ``edge`` holds the x = 1 column."""

    grid: Grid
    values: np.ndarray
    edge: np.ndarray | None = None

    def seam_residual(self) -> float:
        if self.edge is None:
            return 0.0
        return float(np.max(np.abs(self.edge - self.values[0])))

    def shifted(self, steps: tuple[int, int]) -> TorusFunction:
        di, dj = steps
        edge = None
        if self.edge is not None and di == 0:
            edge = np.roll(self.edge, -dj)
        return TorusFunction(self.grid, roll_sites(self.values, steps), edge)

    def to_json(self) -> dict:
        return {"twist": 0, "nx": self.grid.nx, "ny": self.grid.ny, "values": _encode(self.values)}

    @classmethod
    def from_json(cls, data: dict) -> TorusFunction:
        grid = Grid(data["nx"], data["ny"])
        return cls(grid, _decode(data["values"], grid.shape))


@dataclass(eq=False)
class TwistedSection:
    """Element of X^c_nu: f(x + 1, y) = e(-c (y - nu)) f(x, y). nu = 0 is M^c."""

    twist: int
    grid: Grid
    values: np.ndarray
    edge: np.ndarray | None = None
    nu: Fraction = field(default_factory=Fraction)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise GridMismatch(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        self.nu = Fraction(self.nu)

    def transition_phase(self) -> np.ndarray:
        """The gluing factor e(-c (y - nu)) along the seam."""
        return e(-self.twist * (self.grid.y - float(self.nu)))

    def measured_transition(self) -> np.ndarray:
        """edge / values[0], the transition read off the samples themselves."""
        if self.edge is None:
            raise ValueError("section carries no seam samples")
        return self.edge / self.values[0]

    def seam_residual(self) -> float:
        if self.edge is None:
            return 0.0
        return float(np.max(np.abs(self.edge - self.transition_phase() * self.values[0])))

    def extended(self) -> np.ndarray:
        """Samples on [0, 1] x [0, 1): the x = 1 column from the twist rule."""
        return np.vstack([self.values, self.transition_phase() * self.values[0]])

    def with_values(self, values: np.ndarray, edge: np.ndarray | None = None) -> TwistedSection:
        return TwistedSection(self.twist, self.grid, values, edge, self.nu)

    def __add__(self, other: TwistedSection) -> TwistedSection:
        check_compatible(self, other)
        edge = None if self.edge is None or other.edge is None else self.edge + other.edge
        return self.with_values(self.values + other.values, edge)

    def __rmul__(self, scalar: complex) -> TwistedSection:
        edge = None if self.edge is None else scalar * self.edge
        return self.with_values(scalar * self.values, edge)

    def act(self, a: TorusFunction) -> TwistedSection:
        """Pointwise action of a function (left and right actions coincide)."""
        if a.grid != self.grid:
            raise GridMismatch("function and section live on different grids")
        edge = None if self.edge is None or a.edge is None else a.edge * self.edge
        return self.with_values(a.values * self.values, edge)

    def to_json(self) -> dict:
        out = {"twist": self.twist, "nx": self.grid.nx, "ny": self.grid.ny}
        if self.nu:
            out["nu"] = format_rational(self.nu)
        out["values"] = _encode(self.values)
        return out

    @classmethod
    def from_json(cls, data: dict) -> TwistedSection:
        grid = Grid(data["nx"], data["ny"])
        nu = parse_rational(data["nu"]) if "nu" in data else Fraction(0)
        return cls(int(data["twist"]), grid, _decode(data["values"], grid.shape), None, nu)


def check_compatible(f: TwistedSection, g: TwistedSection) -> None:
    if f.grid != g.grid:
        raise GridMismatch(f"grids differ: {f.grid} vs {g.grid}")
    if f.twist != g.twist or f.nu != g.nu:
        raise TwistMismatch(f"twists differ: (c={f.twist}, nu={f.nu}) vs (c={g.twist}, nu={g.nu})")
