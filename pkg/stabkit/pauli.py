"""
Phase-quotiented Pauli operators in symplectic form.

A Pauli on n qubits is stored as two n-bit vectors (z, x). The η image is the
2n-bit concatenation (z|x): bit i < n is the Z part of qubit i, bit n+i its
X part. Strings are read left to right, leftmost character = qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from stabkit.errors import FormatError, LengthMismatch, OddLength
from stabkit.gf2_linalg import BitVector, parity

# (z, x) bit pair per single-qubit Pauli
_LETTER_BITS = {"I": (0, 0), "X": (0, 1), "Y": (1, 1), "Z": (1, 0)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}


@dataclass(frozen=True)
class PauliOperator:
    z: BitVector
    x: BitVector

    def __post_init__(self) -> None:
        if self.z.length != self.x.length:
            raise LengthMismatch(f"z part has {self.z.length} qubits, x part {self.x.length}")

    @property
    def n(self) -> int:
        return self.z.length

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(BitVector.zeros(n), BitVector.zeros(n))

    @classmethod
    def from_ints(cls, z: int, x: int, n: int) -> PauliOperator:
        return cls(BitVector(z, n), BitVector(x, n))

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        text = text.strip().upper()
        z = x = 0
        for i, letter in enumerate(text):
            if letter not in _LETTER_BITS:
                raise FormatError(f"Pauli string may only contain I, X, Y, Z: {text!r}")
            zb, xb = _LETTER_BITS[letter]
            z |= zb << i
            x |= xb << i
        return cls.from_ints(z, x, len(text))

    @classmethod
    def single(cls, letter: str, qubit: int, n: int) -> PauliOperator:
        zb, xb = _LETTER_BITS[letter.upper()]
        return cls.from_ints(zb << qubit, xb << qubit, n)

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[(self.z[qubit], self.x[qubit])]

    def to_string(self) -> str:
        return "".join(self.letter(i) for i in range(self.n))

    def __str__(self) -> str:
        return self.to_string()

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def is_identity(self) -> bool:
        return self.z.value == 0 and self.x.value == 0

    def support(self) -> int:
        """Bitmask of qubits acted on non-trivially."""

        return self.z.value | self.x.value

    def tensor(self, other: PauliOperator) -> PauliOperator:
        return PauliOperator(self.z.concat(other.z), self.x.concat(other.x))


def identity(n: int) -> PauliOperator:
    return PauliOperator.identity(n)


def eta_encode(p: PauliOperator) -> BitVector:
    return p.z.concat(p.x)


def eta_decode(b: BitVector) -> PauliOperator:
    if b.length % 2:
        raise OddLength(f"symplectic vector must have even length, got {b.length}")
    n = b.length // 2
    return PauliOperator(b.slice(0, n), b.slice(n, 2 * n))


def eta_key(p: PauliOperator) -> str:
    """Lexicographic tie-break key: the η image as a 0/1 string."""

    return eta_encode(p).to_string()


def _check_same_n(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise LengthMismatch(f"operators on {a.n} and {b.n} qubits")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    _check_same_n(a, b)
    return PauliOperator(a.z ^ b.z, a.x ^ b.x)


def commutes(a: PauliOperator, b: PauliOperator) -> int:
    """Symplectic product: 0 if a and b commute, 1 if they anticommute."""

    _check_same_n(a, b)
    return parity((a.z.value & b.x.value) ^ (a.x.value & b.z.value))


def weight(p: PauliOperator) -> int:
    return p.support().bit_count()


def symplectic_weight(p: PauliOperator) -> int:
    return p.z.weight() + p.x.weight()


def eta_int(p: PauliOperator) -> int:
    return p.z.value | (p.x.value << p.n)


def from_eta_int(value: int, n: int) -> PauliOperator:
    mask = (1 << n) - 1
    return PauliOperator.from_ints(value & mask, value >> n, n)


def swap_halves(value: int, n: int) -> int:
    """(z|x) -> (x|z); parity(a & swap_halves(b)) is the symplectic product."""

    mask = (1 << n) - 1
    return (value >> n) | ((value & mask) << n)


def symplectic_int(a: int, b: int, n: int) -> int:
    return parity(a & swap_halves(b, n))


def eta_weight(value: int, n: int) -> int:
    """Qubit weight of a packed η image."""

    mask = (1 << n) - 1
    return ((value & mask) | (value >> n)).bit_count()
