"""Crossed-product equivalence: the relation generated by three moves.

* ``Dual``      M  ~  dual(M)
* ``Conj(a)``   M  ~  a(M) = A_a (x) M (x) A_{a^-1}
* ``Flip``      M^c (x) A_{t_v}  ~  M^c (x) A_{t_{-v}}   (translations only)

Each move preserves the isomorphism class of the crossed product
C(T^2) x|_M Z. A :class:`CpCertificate` records every intermediate state so
a verifier only replays, never searches.
"""

from __future__ import annotations

from dataclasses import dataclass

from qhmpic.exact_algebra import (
    AffineAuto,
    format_matrix,
    format_point,
    invert,
    parse_matrix,
    parse_point,
)
from qhmpic.expr import ParseError, evaluate
from qhmpic.orbit import DEFAULT_NODE_CAP, same_orbit
from qhmpic.picard import PicElement, pic_conjugate, pic_dual, render


class FlipOnNonTranslation(ValueError):
    pass


@dataclass(frozen=True)
class DualMove:
    def __str__(self) -> str:
        return "dual"


@dataclass(frozen=True)
class FlipMove:
    def __str__(self) -> str:
        return "flip"


@dataclass(frozen=True)
class ConjMove:
    alpha: AffineAuto

    def __str__(self) -> str:
        return f"conj({self.alpha})"


CpMove = DualMove | FlipMove | ConjMove
DUAL = DualMove()
FLIP = FlipMove()


def apply_move(s: PicElement, move) -> PicElement:
    if isinstance(move, DualMove):
        return pic_dual(s)
    if isinstance(move, ConjMove):
        return pic_conjugate(move.alpha, s)
    if isinstance(move, FlipMove):
        if not s.auto.is_translation():
            raise FlipOnNonTranslation(f"flip needs a translation state, got {render(s)}")
        return PicElement(s.twist, AffineAuto(s.auto.linear, -s.auto.shift))
    raise TypeError(f"unknown move {move!r}")


def inverse_move(move):
    if isinstance(move, ConjMove):
        return ConjMove(invert(move.alpha))
    return move


@dataclass(frozen=True)
class CpCertificate:
    start: PicElement
    steps: tuple[tuple[CpMove, PicElement], ...]
    end: PicElement

    @classmethod
    def build(cls, start: PicElement, moves) -> CpCertificate:
        steps = []
        state = start
        for move in moves:
            state = apply_move(state, move)
            steps.append((move, state))
        return cls(start, tuple(steps), state)

    @property
    def moves(self) -> list:
        return [m for m, _ in self.steps]

    def reversed(self) -> CpCertificate:
        states = [self.start] + [s for _, s in self.steps]
        steps = tuple(
            (inverse_move(move), states[k]) for k, (move, _) in reversed(list(enumerate(self.steps)))
        )
        return CpCertificate(self.end, steps, self.start)

    def then(self, other: CpCertificate) -> CpCertificate:
        if other.start != self.end:
            raise ValueError("certificates do not chain: end and start differ")
        return CpCertificate(self.start, self.steps + other.steps, other.end)

    def to_json(self) -> dict:
        return {
            "start": render(self.start),
            "end": render(self.end),
            "steps": [{"move": move_to_json(m), "state": render(s)} for m, s in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict) -> CpCertificate:
        steps = tuple((move_from_json(st["move"]), evaluate(st["state"])) for st in data["steps"])
        return cls(evaluate(data["start"]), steps, evaluate(data["end"]))


def move_to_json(move):
    if isinstance(move, DualMove):
        return "dual"
    if isinstance(move, FlipMove):
        return "flip"
    if isinstance(move, ConjMove):
        return {"conj": {"matrix": format_matrix(move.alpha.linear), "shift": format_point(move.alpha.shift)}}
    raise TypeError(f"unknown move {move!r}")


def move_from_json(data):
    if data == "dual":
        return DUAL
    if data == "flip":
        return FLIP
    if isinstance(data, dict) and set(data) == {"conj"}:
        body = data["conj"]
        return ConjMove(AffineAuto(parse_matrix(body["matrix"]), parse_point(body.get("shift", "(0,0)"))))
    raise ValueError(f"unknown move {data!r}")


def replay_mismatch(cert: CpCertificate) -> int | None:
    """Index of the first step whose recorded state does not replay.

    ``len(cert.steps)`` flags a wrong end state; ``None`` means the
    certificate is valid.
    """
    state = cert.start
    for k, (move, recorded) in enumerate(cert.steps):
        try:
            state = apply_move(state, move)
        except (FlipOnNonTranslation, TypeError):
            return k
        if state != recorded:
            return k
    if state != cert.end:
        return len(cert.steps)
    return None


def verify_certificate(cert: CpCertificate) -> bool:
    return replay_mismatch(cert) is None


def verify_certificate_json(data) -> tuple[bool, int | None, str]:
    """Replay a serialized certificate; returns (ok, bad_step, message)."""
    try:
        cert = CpCertificate.from_json(data)
    except (KeyError, TypeError, ValueError, ParseError) as exc:
        return False, None, f"malformed certificate: {exc}"
    bad = replay_mismatch(cert)
    if bad is None:
        return True, None, "ok"
    if bad == len(cert.steps):
        return False, bad, "end state does not match replay"
    return False, bad, f"step {bad} does not replay"


@dataclass(frozen=True)
class CpDecision:
    certificate: CpCertificate | None
    reason: str


def decide_cp(s1: PicElement, s2: PicElement, node_cap: int = DEFAULT_NODE_CAP) -> CpDecision:
    """Search for a move chain from s1 to s2 on translation states.

    The chain is: an optional conjugation by sigma (or a flip when v2 = -v1)
    moving the vector onto v2, then Dual + Flip when the twist sign is off.
    """
    if not (s1.auto.is_translation() and s2.auto.is_translation()):
        return CpDecision(None, "undecided")
    if abs(s1.twist) != abs(s2.twist):
        return CpDecision(None, "twist magnitudes differ")
    v1, v2 = s1.auto.shift, s2.auto.shift
    moves: list | None = None
    if v1 == v2:
        moves = []
    elif v1 == -v2:
        moves = [FLIP]
    else:
        w = same_orbit(v1, v2, node_cap)
        if w is not None:
            moves = [ConjMove(AffineAuto(w.sigma))]
        else:
            w = same_orbit(v1, -v2, node_cap)
            if w is not None:
                moves = [ConjMove(AffineAuto(w.sigma)), FLIP]
    if moves is None:
        return CpDecision(None, "translation vectors in different orbits")
    cert = CpCertificate.build(s1, moves)
    if cert.end.twist != s2.twist:
        cert = CpCertificate.build(s1, moves + [DUAL, FLIP])
    if cert.end != s2:
        raise AssertionError(f"certificate construction failed: {render(cert.end)} != {render(s2)}")
    return CpDecision(cert, "certificate found")


def cp_equivalent(s1: PicElement, s2: PicElement, node_cap: int = DEFAULT_NODE_CAP) -> CpCertificate | None:
    return decide_cp(s1, s2, node_cap).certificate


def translation_state(c: int, x, y) -> PicElement:
    return PicElement(c, AffineAuto.translation(x, y))


__all__ = [
    "ConjMove",
    "CpCertificate",
    "CpMove",
    "CpDecision",
    "DUAL",
    "DualMove",
    "FLIP",
    "FlipMove",
    "FlipOnNonTranslation",
    "apply_move",
    "cp_equivalent",
    "decide_cp",
    "inverse_move",
    "move_from_json",
    "move_to_json",
    "replay_mismatch",
    "translation_state",
    "verify_certificate",
    "verify_certificate_json",
]
