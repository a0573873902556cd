"""Exact rational helpers: parsing, printing and small dense linear algebra."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from stabkit.errors import FormatError, SingularSystem


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Read "a/b", an integer or a finite decimal string as an exact rational."""

    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)

    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not a rational number: {text!r}") from None


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def nearest_integer(value: Fraction) -> tuple[int, Fraction]:
    """Round half up; returns the integer and the distance to it."""

    nearest = math.floor(value + Fraction(1, 2))
    return nearest, abs(value - nearest)


def _eliminate(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    # Gauss-Jordan over Q; rows are modified in place
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][col]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rational_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    if not matrix:
        return 0
    ncols = len(matrix[0])
    _, pivots = _eliminate([[Fraction(x) for x in row] for row in matrix], ncols)
    return len(pivots)


def solve_rational(
    matrix: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> list[Fraction]:
    """Solve a square system exactly; raises SingularSystem when det = 0."""

    size = len(matrix)
    if len(rhs) != size or any(len(row) != size for row in matrix):
        raise SingularSystem(f"expected a square system, got {size} rows and rhs of {len(rhs)}")

    augmented = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    reduced, pivots = _eliminate(augmented, size)

    if len(pivots) < size:
        raise SingularSystem(f"constraint matrix has rank {len(pivots)} < {size}")

    return [reduced[i][size] for i in range(size)]


def least_squares_rational(
    matrix: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> list[Fraction]:
    """
    Exact least-squares solution of an overdetermined system through the
    normal equations. A consistent system gets its exact solution back.
    Raises SingularSystem without full column rank.
    """

    if len(rhs) != len(matrix):
        raise SingularSystem(f"{len(matrix)} rows but a rhs of {len(rhs)}")
    if not matrix:
        raise SingularSystem("empty system")

    columns = [[Fraction(x) for x in col] for col in zip(*matrix)]
    target = [Fraction(b) for b in rhs]
    size = len(columns)

    normal = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            value = sum((a * b for a, b in zip(columns[i], columns[j]) if a and b), Fraction(0))
            normal[i][j] = normal[j][i] = value
    projected = [sum((a * b for a, b in zip(col, target) if a and b), Fraction(0)) for col in columns]

    return solve_rational(normal, projected)
