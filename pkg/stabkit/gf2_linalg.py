"""
Dense linear algebra over GF(2).

Rows are packed into Python ints (bit i of the int is column i), so row
operations are single XORs. numpy arrays are accepted and produced at the
edges through ``from_array`` / ``to_array``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from stabkit.errors import FormatError, Inconsistent, LengthMismatch, RankDeficient, SingularMatrix


def parity(value: int) -> int:
    return value.bit_count() & 1


@dataclass(frozen=True)
class BitVector:
    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError(f"negative length {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(0, length)

    @classmethod
    def unit(cls, index: int, length: int) -> BitVector:
        return cls(1 << index, length)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        value = 0
        length = 0
        for i, bit in enumerate(bits):
            if int(bit) & 1:
                value |= 1 << i
            length = i + 1
        return cls(value, length)

    @classmethod
    def from_string(cls, text: str) -> BitVector:
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise FormatError(f"bit string may only contain 0/1: {text!r}")
        return cls.from_bits(int(ch) for ch in text)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if not -self.length <= index < self.length:
            raise IndexError(index)
        return (self.value >> (index % self.length)) & 1

    def __iter__(self) -> Iterator[int]:
        return ((self.value >> i) & 1 for i in range(self.length))

    def __xor__(self, other: BitVector) -> BitVector:
        if self.length != other.length:
            raise LengthMismatch(f"bit vectors of length {self.length} and {other.length}")
        return BitVector(self.value ^ other.value, self.length)

    __add__ = __xor__

    def dot(self, other: BitVector) -> int:
        if self.length != other.length:
            raise LengthMismatch(f"bit vectors of length {self.length} and {other.length}")
        return parity(self.value & other.value)

    def weight(self) -> int:
        return self.value.bit_count()

    def is_zero(self) -> bool:
        return self.value == 0

    def concat(self, other: BitVector) -> BitVector:
        return BitVector(self.value | (other.value << self.length), self.length + other.length)

    def slice(self, start: int, stop: int) -> BitVector:
        width = stop - start
        return BitVector((self.value >> start) & ((1 << width) - 1), width)

    def to_string(self) -> str:
        return "".join(str(bit) for bit in self)

    def to_array(self) -> np.ndarray:
        return np.fromiter(iter(self), dtype=np.uint8, count=self.length)

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class BitMatrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self) -> None:
        limit = 1 << self.ncols
        if any(row < 0 or row >= limit for row in self.rows):
            raise ValueError(f"row does not fit in {self.ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @classmethod
    def from_rows(cls, rows: Iterable[BitVector | str | Sequence[int]], ncols: int | None = None) -> BitMatrix:
        vectors = []
        for row in rows:
            if isinstance(row, BitVector):
                vectors.append(row)
            elif isinstance(row, str):
                vectors.append(BitVector.from_string(row))
            else:
                vectors.append(BitVector.from_bits(row))

        if ncols is None:
            ncols = vectors[0].length if vectors else 0
        if any(v.length != ncols for v in vectors):
            raise LengthMismatch(f"every row must have {ncols} columns")

        return cls(tuple(v.value for v in vectors), ncols)

    @classmethod
    def from_array(cls, array: np.ndarray | Sequence[Sequence[int]]) -> BitMatrix:
        arr = np.asarray(array, dtype=np.int64) % 2
        if arr.ndim != 2:
            raise FormatError(f"expected a 2-d array, got shape {arr.shape}")
        return cls.from_rows((row.tolist() for row in arr), ncols=arr.shape[1])

    @classmethod
    def from_text(cls, text: str) -> BitMatrix:
        """Parse one '0'/'1' row per line; '#' starts a comment line."""

        lines = [
            line.strip()
            for line in text.splitlines()
            if line.strip() and not line.strip().startswith("#")
        ]
        if not lines:
            raise FormatError("matrix text contains no rows")
        widths = {len(line) for line in lines}
        if len(widths) != 1:
            raise FormatError(f"rows have differing lengths {sorted(widths)}")
        return cls.from_rows(BitVector.from_string(line) for line in lines)

    @classmethod
    def identity(cls, size: int) -> BitMatrix:
        return cls(tuple(1 << i for i in range(size)), size)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls((0,) * nrows, ncols)

    def row(self, index: int) -> BitVector:
        return BitVector(self.rows[index], self.ncols)

    def row_vectors(self) -> list[BitVector]:
        return [BitVector(row, self.ncols) for row in self.rows]

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def stack(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.ncols:
            raise LengthMismatch(f"cannot stack {self.ncols} and {other.ncols} columns")
        return BitMatrix(self.rows + other.rows, self.ncols)

    def transpose(self) -> BitMatrix:
        cols = []
        for j in range(self.ncols):
            col = 0
            for i, row in enumerate(self.rows):
                if (row >> j) & 1:
                    col |= 1 << i
            cols.append(col)
        return BitMatrix(tuple(cols), self.nrows)

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.nrows:
            raise LengthMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for row in self.rows:
            acc = 0
            for j in range(self.ncols):
                if (row >> j) & 1:
                    acc ^= other.rows[j]
            out.append(acc)
        return BitMatrix(tuple(out), other.ncols)

    def apply(self, vector: BitVector) -> BitVector:
        """Matrix-vector product m·v."""

        if vector.length != self.ncols:
            raise LengthMismatch(f"vector of length {vector.length} for {self.ncols} columns")
        return BitVector.from_bits(parity(row & vector.value) for row in self.rows) \
            if self.rows else BitVector.zeros(0)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, row in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (row >> j) & 1
        return out

    def to_text(self) -> str:
        return "\n".join(self.row(i).to_string() for i in range(self.nrows))


class RrefResult(NamedTuple):
    matrix: BitMatrix
    pivots: tuple[int, ...]
    rank: int


def _reduce(rows: list[int], pivot_cols: int) -> tuple[list[int], list[int]]:
    # Gauss-Jordan; pivots searched in the first pivot_cols columns only
    rows = list(rows)
    pivots: list[int] = []
    r = 0
    for col in range(pivot_cols):
        mask = 1 << col
        found = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if found is None:
            continue
        rows[r], rows[found] = rows[found], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rref(m: BitMatrix) -> RrefResult:
    rows, pivots = _reduce(list(m.rows), m.ncols)
    return RrefResult(BitMatrix(tuple(rows), m.ncols), tuple(pivots), len(pivots))


def rank(m: BitMatrix) -> int:
    return rref(m).rank


def invert(m: BitMatrix) -> BitMatrix:
    n = m.nrows
    if m.ncols != n:
        raise SingularMatrix(f"only square matrices are invertible, got {m.shape}")

    augmented = [row | (1 << (n + i)) for i, row in enumerate(m.rows)]
    reduced, pivots = _reduce(augmented, n)
    if len(pivots) < n:
        raise SingularMatrix(f"matrix has rank {len(pivots)} < {n}")

    return BitMatrix(tuple(row >> n for row in reduced), n)


def complete_basis(m: BitMatrix) -> BitMatrix:
    """Rows extending m to a basis of GF(2)^ncols: unit vectors at non-pivot columns."""

    if m.nrows > m.ncols:
        raise RankDeficient(f"{m.nrows} rows cannot be independent in {m.ncols} columns")

    result = rref(m)
    if result.rank < m.nrows:
        raise RankDeficient(f"rows are dependent: rank {result.rank} < {m.nrows}")

    pivot_set = set(result.pivots)
    extra = tuple(1 << j for j in range(m.ncols) if j not in pivot_set)
    return BitMatrix(extra, m.ncols)


def solve(m: BitMatrix, b: BitVector) -> BitVector:
    """Particular solution of m·x = b with every free variable set to 0."""

    if b.length != m.nrows:
        raise LengthMismatch(f"right-hand side of length {b.length} for {m.nrows} rows")

    n = m.ncols
    augmented = [row | (((b.value >> i) & 1) << n) for i, row in enumerate(m.rows)]
    reduced, pivots = _reduce(augmented, n)

    for row in reduced[len(pivots):]:
        if row >> n:
            raise Inconsistent("linear system has no solution over GF(2)")

    x = 0
    for r, col in enumerate(pivots):
        if (reduced[r] >> n) & 1:
            x |= 1 << col
    return BitVector(x, n)


def kernel(m: BitMatrix) -> BitMatrix:
    """Basis of {x : m·x = 0}, one row per free column in increasing order."""

    reduced, pivots = _reduce(list(m.rows), m.ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivot_set:
            continue
        x = 1 << free
        for r, col in enumerate(pivots):
            if (reduced[r] >> free) & 1:
                x |= 1 << col
        basis.append(x)
    return BitMatrix(tuple(basis), m.ncols)


def span_elements(generators: Sequence[int]) -> Iterator[int]:
    """All 2^len(generators) XOR combinations, in Gray-code order."""

    current = 0
    yield current
    for step in range(1, 1 << len(generators)):
        # bit flipped between consecutive Gray codes = lowest set bit of step
        current ^= generators[(step & -step).bit_length() - 1]
        yield current
