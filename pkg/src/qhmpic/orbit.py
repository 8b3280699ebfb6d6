"""GL_2(Z)-orbits of rational points of T^2, decided by breadth-first search.

The action is the linear one, p -> A p (mod 1). A rational point with
reduced common denominator q lives in (Z/q)^2 and its orbit is finite, so
BFS over the five generators below visits it completely.
BFS is authoritative; gcd(a, b, q) is only used as a fast reject.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from qhmpic.exact_algebra import (
    IDENTITY_MATRIX,
    TorusPoint,
    UnimodularMatrix,
)

T = UnimodularMatrix(1, 1, 0, 1)
U = UnimodularMatrix(1, 0, 1, 1)
J = UnimodularMatrix(1, 0, 0, -1)

# fixed visiting order; determines which witness is found first
GENERATORS: tuple[tuple[str, UnimodularMatrix], ...] = (
    ("T", T),
    ("T^-1", T.inverse()),
    ("U", U),
    ("U^-1", U.inverse()),
    ("J", J),
)
GENERATOR_BY_LABEL = dict(GENERATORS)

DEFAULT_NODE_CAP = 1_000_000


class OrbitSearchLimit(RuntimeError):
    """The BFS frontier exceeded the configured node cap."""


@dataclass(frozen=True)
class ResiduePoint:
    a: int
    b: int
    q: int

    def __post_init__(self):
        if self.q < 1 or not (0 <= self.a < self.q and 0 <= self.b < self.q):
            raise ValueError(f"invalid residue point {self!r}")

    def to_point(self) -> TorusPoint:
        return TorusPoint(Fraction(self.a, self.q), Fraction(self.b, self.q))

    @property
    def invariant_gcd(self) -> int:
        return math.gcd(self.a, self.b, self.q)


@dataclass(frozen=True)
class OrbitWitness:
    """sigma with sigma . p = p' (mod 1).

    ``path`` lists generator labels in application order, so ``sigma`` is
    the product of the generators with the last label leftmost.
    """

    sigma: UnimodularMatrix
    path: tuple[str, ...] = ()

    @classmethod
    def from_path(cls, path) -> OrbitWitness:
        return cls(path_product(path), tuple(path))


@dataclass(frozen=True)
class OrbitDecision:
    witness: OrbitWitness | None
    reason: str
    orbit_size: int | None = None
    invariant_gcd: int | None = None
    visited: int = 0

    @property
    def same_orbit(self) -> bool:
        return self.witness is not None


def path_product(path) -> UnimodularMatrix:
    sigma = IDENTITY_MATRIX
    for label in path:
        sigma = GENERATOR_BY_LABEL[label] @ sigma
    return sigma


def to_residue(p: TorusPoint) -> ResiduePoint:
    q = math.lcm(p.x.denominator, p.y.denominator)
    return ResiduePoint(p.x.numerator * (q // p.x.denominator), p.y.numerator * (q // p.y.denominator), q)


def maps_to(sigma: UnimodularMatrix, p: TorusPoint, target: TorusPoint) -> bool:
    """Exact check sigma . p == target in T^2."""
    x, y = sigma.act(p.x, p.y)
    return TorusPoint(x, y) == target


def _bfs(start: ResiduePoint, goal: tuple[int, int] | None, node_cap: int):
    q = start.q
    origin = (start.a, start.b)
    parent: dict[tuple[int, int], tuple[tuple[int, int], str] | None] = {origin: None}
    queue = deque([origin])
    found = origin if goal == origin else None
    while queue and found is None:
        u, v = queue.popleft()
        for label, g in GENERATORS:
            nxt = g.act_mod(u, v, q)
            if nxt in parent:
                continue
            parent[nxt] = ((u, v), label)
            if len(parent) > node_cap:
                raise OrbitSearchLimit(f"orbit search exceeded {node_cap} nodes (q = {q})")
            if nxt == goal:
                found = nxt
                break
            queue.append(nxt)
    return parent, found


def _path_to(parent, node) -> tuple[str, ...]:
    labels = []
    while parent[node] is not None:
        node, label = parent[node]
        labels.append(label)
    return tuple(reversed(labels))


def enumerate_orbit(p: TorusPoint, node_cap: int = DEFAULT_NODE_CAP) -> set[ResiduePoint]:
    r = to_residue(p)
    parent, _ = _bfs(r, None, node_cap)
    return {ResiduePoint(a, b, r.q) for a, b in parent}


def decide_orbit(p: TorusPoint, p2: TorusPoint, node_cap: int = DEFAULT_NODE_CAP) -> OrbitDecision:
    r, r2 = to_residue(p), to_residue(p2)
    if r.q != r2.q:
        return OrbitDecision(None, "point orders differ", None, r.invariant_gcd)
    if r.invariant_gcd != r2.invariant_gcd:
        return OrbitDecision(None, "gcd invariant differs", None, r.invariant_gcd)
    parent, found = _bfs(r, (r2.a, r2.b), node_cap)
    if found is None:
        # BFS ran to exhaustion, so parent holds the full orbit
        return OrbitDecision(None, "orbit exhausted", len(parent), r.invariant_gcd, len(parent))
    witness = OrbitWitness.from_path(_path_to(parent, found))
    if not maps_to(witness.sigma, p, p2):
        raise AssertionError(f"BFS produced an invalid witness {witness}")
    return OrbitDecision(witness, "witness found", None, r.invariant_gcd, len(parent))


def same_orbit(p: TorusPoint, p2: TorusPoint, node_cap: int = DEFAULT_NODE_CAP) -> OrbitWitness | None:
    return decide_orbit(p, p2, node_cap).witness


def orbit_partition(q: int) -> list[frozenset[tuple[int, int]]]:
    """All orbits of (Z/q)^2, in order of their smallest element."""
    seen: set[tuple[int, int]] = set()
    orbits = []
    for a in range(q):
        for b in range(q):
            if (a, b) in seen:
                continue
            parent, _ = _bfs(ResiduePoint(a, b, q), None, q * q)
            orbit = frozenset(parent)
            seen |= orbit
            orbits.append(orbit)
    return orbits
