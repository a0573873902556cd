"""Memoryless Pauli channels with exact rational per-qubit probabilities."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable

from stabkit.errors import FormatError, LengthMismatch, OutOfRange
from stabkit.exact import format_rational, parse_rational
from stabkit.pauli import PauliOperator, eta_int

PAULI_ORDER = ("I", "X", "Y", "Z")

QubitVector = tuple[Fraction, Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class ChannelStructure:
    """Which qubits share a probability vector, and which letters it can emit."""

    n: int
    groups: tuple[tuple[int, tuple[bool, bool, bool]], ...]

    def signature(self, eta: int) -> tuple[int, ...] | None:
        """
        Per-group (X, Y, Z) counts of a packed η image, or None when the
        error has probability zero. Errors with equal signatures are equally
        likely, so callers can tally signatures and price each once.
        """

        mask = (1 << self.n) - 1
        z = eta & mask
        x = eta >> self.n
        y_pos = z & x
        x_pos = x & ~z
        z_pos = z & ~x

        out: list[int] = []
        for group_mask, (has_x, has_y, has_z) in self.groups:
            cx = (x_pos & group_mask).bit_count()
            cy = (y_pos & group_mask).bit_count()
            cz = (z_pos & group_mask).bit_count()
            if (cx and not has_x) or (cy and not has_y) or (cz and not has_z):
                return None
            out.extend((cx, cy, cz))
        return tuple(out)


def _check_rate(name: str, value: Fraction) -> Fraction:
    value = Fraction(value)
    if not 0 <= value <= 1:
        raise OutOfRange(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class PauliChannel:
    n: int
    q: tuple[QubitVector, ...]

    def __post_init__(self) -> None:
        if len(self.q) != self.n:
            raise LengthMismatch(f"channel on {self.n} qubits has {len(self.q)} probability vectors")
        for i, vec in enumerate(self.q):
            if len(vec) != 4:
                raise FormatError(f"qubit {i}: expected 4 probabilities, got {len(vec)}")
            if any(not 0 <= p <= 1 for p in vec):
                raise OutOfRange(f"qubit {i}: probabilities {vec} outside [0, 1]")
            if sum(vec) != 1:
                raise OutOfRange(f"qubit {i}: probabilities sum to {sum(vec)}, not 1")

    @cached_property
    def groups(self) -> tuple[tuple[int, QubitVector], ...]:
        """Qubits sharing one probability vector, as (bitmask, vector)."""

        masks: dict[QubitVector, int] = defaultdict(int)
        for i, vec in enumerate(self.q):
            masks[vec] |= 1 << i
        return tuple((mask, vec) for vec, mask in masks.items())

    @cached_property
    def structure(self) -> ChannelStructure:
        """Group masks and which of X, Y, Z each group allows; signatures depend on nothing else."""

        return ChannelStructure(
            self.n,
            tuple((mask, (qx != 0, qy != 0, qz != 0)) for mask, (_, qx, qy, qz) in self.groups),
        )

    def take(self, start: int, stop: int) -> PauliChannel:
        return PauliChannel(stop - start, self.q[start:stop])

    def signature(self, eta: int) -> tuple[int, ...] | None:
        return self.structure.signature(eta)

    def signature_probability(self, signature: tuple[int, ...]) -> Fraction:
        prob = Fraction(1)
        for g, (group_mask, (qi, qx, qy, qz)) in enumerate(self.groups):
            cx, cy, cz = signature[3 * g: 3 * g + 3]
            ci = group_mask.bit_count() - cx - cy - cz
            prob *= qi**ci * qx**cx * qy**cy * qz**cz
        return prob

    def probability_eta(self, eta: int) -> Fraction:
        sig = self.signature(eta)
        return Fraction(0) if sig is None else self.signature_probability(sig)


# ==========================================
# Named channels
# ==========================================
def _uniform(n: int, vec: QubitVector) -> PauliChannel:
    if n < 0:
        raise OutOfRange(f"qubit count must be non-negative, got {n}")
    return PauliChannel(n, (vec,) * n)


def independent_xz(n: int, p: Fraction | int) -> PauliChannel:
    p = _check_rate("p", p)
    half = p / 2
    return _uniform(n, ((1 - half) ** 2, half * (1 - half), half * half, half * (1 - half)))


def depolarizing(n: int, p: Fraction | int) -> PauliChannel:
    p = _check_rate("p", p)
    return _uniform(n, (1 - p, p / 3, p / 3, p / 3))


def z_only(q: Fraction | int) -> PauliChannel:
    q = _check_rate("q", q)
    return PauliChannel(1, ((1 - q, Fraction(0), Fraction(0), q),))


def error_free() -> PauliChannel:
    return z_only(0)


def compose(channels: Iterable[PauliChannel], n: int | None = None) -> PauliChannel:
    vectors: list[QubitVector] = []
    for ch in channels:
        vectors.extend(ch.q)
    if n is not None and n != len(vectors):
        raise LengthMismatch(f"composed channel has {len(vectors)} qubits, expected {n}")
    return PauliChannel(len(vectors), tuple(vectors))


def error_probability(ch: PauliChannel, e: PauliOperator) -> Fraction:
    if e.n != ch.n:
        raise LengthMismatch(f"error on {e.n} qubits for a channel on {ch.n}")
    return ch.probability_eta(eta_int(e))


# ==========================================
# Text and JSON forms
# ==========================================
def channel_to_json(ch: PauliChannel) -> dict[str, Any]:
    return {
        "n": ch.n,
        "qubits": [
            {name: format_rational(value) for name, value in zip(PAULI_ORDER, vec)}
            for vec in ch.q
        ],
    }


def channel_from_json(data: dict[str, Any]) -> PauliChannel:
    try:
        qubits = data["qubits"]
        vectors = tuple(
            tuple(parse_rational(entry.get(name, 0)) for name in PAULI_ORDER) for entry in qubits
        )
        n = int(data.get("n", len(vectors)))
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"malformed channel JSON: {exc}") from None
    return PauliChannel(n, vectors)


def parse_channel_spec(text: str, n: int) -> PauliChannel:
    """
    Shortcut forms: "xz:p=1/8", "depol:p=1/10", "z:q=1/3", "none".
    Anything starting with '{' is parsed as channel JSON.
    """

    text = text.strip()
    if text.startswith("{"):
        try:
            return channel_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(f"channel JSON does not parse: {exc}") from None

    if text == "none":
        return _uniform(n, error_free().q[0])

    kind, _, arg = text.partition(":")
    key, _, value = arg.partition("=")
    if not value:
        raise FormatError(f"channel spec {text!r} should look like 'xz:p=1/8'")

    rate = parse_rational(value)
    if kind == "xz" and key == "p":
        return independent_xz(n, rate)
    if kind == "depol" and key == "p":
        return depolarizing(n, rate)
    if kind == "z" and key == "q":
        return _uniform(n, z_only(rate).q[0])

    raise FormatError(f"unknown channel spec {text!r}")


def xz_layout(p: Fraction, q: Fraction, data_qubits: int, clean_qubits: int) -> PauliChannel:
    """X-Z noise on the data block, error-free padding, then one Z-only qubit."""

    return compose(
        [independent_xz(data_qubits, p)]
        + [error_free()] * clean_qubits
        + [z_only(q)]
    )
