"""
Stabilizer codes with a canonical basis {S_i, T_i, X̄_j, Z̄_j}.

The commutation table every code produced here satisfies:
    T_i anticommutes with S_i only, X̄_j anticommutes with Z̄_j only,
    every other pair of basis operators commutes.
All queries work on packed η ints (see ``stabkit.pauli``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, NamedTuple, Sequence

from stabkit import config
from stabkit.errors import DependentGenerators, FormatError, LengthMismatch, NotAbelian, TooLarge
from stabkit.gf2_linalg import BitMatrix, BitVector, kernel, rank, solve, span_elements
from stabkit.pauli import (
    PauliOperator,
    eta_int,
    eta_weight,
    from_eta_int,
    swap_halves,
    symplectic_int,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Syndrome:
    bits: BitVector

    @classmethod
    def zero(cls, length: int) -> Syndrome:
        return cls(BitVector.zeros(length))

    @classmethod
    def from_string(cls, text: str) -> Syndrome:
        return cls(BitVector.from_string(text))

    @classmethod
    def from_int(cls, value: int, length: int) -> Syndrome:
        return cls(BitVector(value, length))

    def __len__(self) -> int:
        return self.bits.length

    def __str__(self) -> str:
        return self.bits.to_string()


@dataclass(frozen=True)
class LogicalLabel:
    """Coset of S in N(S): bit j of x_part selects X̄_j, bit j of z_part selects Z̄_j."""

    x_part: BitVector
    z_part: BitVector

    @classmethod
    def trivial(cls, k: int) -> LogicalLabel:
        return cls(BitVector.zeros(k), BitVector.zeros(k))

    @classmethod
    def from_name(cls, name: str) -> LogicalLabel:
        """Read a label written as one I/X/Y/Z letter per logical qubit."""

        op = PauliOperator.from_string(name)
        return cls(op.x, op.z)

    @property
    def k(self) -> int:
        return self.x_part.length

    def is_trivial(self) -> bool:
        return self.x_part.is_zero() and self.z_part.is_zero()

    def sort_key(self) -> tuple[str, str]:
        return self.x_part.to_string(), self.z_part.to_string()

    @property
    def name(self) -> str:
        if self.k == 0:
            return "I"
        return PauliOperator(self.z_part, self.x_part).to_string()

    def __str__(self) -> str:
        return self.name


class Decomposition(NamedTuple):
    syndrome: Syndrome
    label: LogicalLabel
    coords: BitVector


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    k: int
    stab_gens: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    pure_errors: tuple[PauliOperator, ...]

    @property
    def r(self) -> int:
        """Number of stabilizer generators, n - k."""

        return len(self.stab_gens)

    @cached_property
    def stab_etas(self) -> tuple[int, ...]:
        return tuple(eta_int(p) for p in self.stab_gens)

    @cached_property
    def pure_etas(self) -> tuple[int, ...]:
        return tuple(eta_int(p) for p in self.pure_errors)

    @cached_property
    def logical_x_etas(self) -> tuple[int, ...]:
        return tuple(eta_int(p) for p in self.logical_x)

    @cached_property
    def logical_z_etas(self) -> tuple[int, ...]:
        return tuple(eta_int(p) for p in self.logical_z)

    def __str__(self) -> str:
        return f"[[{self.n},{self.k}]] code"


@dataclass
class ValidationReport:
    count_ok: bool = True
    dependent: bool = False
    spans: bool = True
    not_abelian: list[tuple[int, int]] = field(default_factory=list)
    logical_commutation: list[tuple[str, int, int]] = field(default_factory=list)
    canonical: list[tuple[str, int, str, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.count_ok
            and not self.dependent
            and self.spans
            and not self.not_abelian
            and not self.logical_commutation
            and not self.canonical
        )

    def failures(self) -> list[str]:
        out = []
        if not self.count_ok:
            out.append("generator counts do not match n and k")
        if self.dependent:
            out.append("stabilizer generators are dependent")
        if not self.spans:
            out.append("canonical basis does not span the symplectic space")
        out.extend(f"NotAbelian: S{i} and S{j} anticommute" for i, j in self.not_abelian)
        out.extend(
            f"logical {kind}{j} anticommutes with S{i}" for kind, j, i in self.logical_commutation
        )
        out.extend(f"commutation {a}{i} vs {b}{j} is wrong" for a, i, b, j in self.canonical)
        return out


# ==========================================
# Construction
# ==========================================
def _single_n(ops: Sequence[PauliOperator], n: int | None) -> int:
    sizes = {op.n for op in ops}
    if n is not None:
        sizes.add(n)
    if not sizes:
        raise LengthMismatch("qubit count is unknown: pass n when there are no generators")
    if len(sizes) != 1:
        raise LengthMismatch(f"operators act on differing qubit counts {sorted(sizes)}")
    return sizes.pop()


def _pair_logicals(pool: list[int], n: int) -> tuple[list[int], list[int]]:
    # symplectic Gram-Schmidt inside the joint commutant of S and T
    xs: list[int] = []
    zs: list[int] = []
    while pool:
        a = pool.pop(0)
        idx = next(i for i, b in enumerate(pool) if symplectic_int(a, b, n))
        b = pool.pop(idx)
        for i, c in enumerate(pool):
            if symplectic_int(c, b, n):
                c ^= a
            if symplectic_int(c, a, n):
                c ^= b
            pool[i] = c
        if not (a >> n) and (b >> n):
            a, b = b, a
        xs.append(a)
        zs.append(b)
    return xs, zs


def canonical_completion(
    stab_gens: Sequence[PauliOperator],
    *,
    n: int | None = None,
    logical_x: Sequence[PauliOperator] | None = None,
    logical_z: Sequence[PauliOperator] | None = None,
) -> StabilizerCode:
    """
    Complete commuting, independent generators to a canonical basis.

    Pure errors come from solving ⟨S_i, T_j⟩ = δ_ij and sweeping the T's so
    they commute. Logicals are either taken from ``logical_x``/``logical_z``
    (the T's are then cleaned against them) or found as symplectic pairs in
    the commutant of all S and T.
    """

    stab_gens = tuple(stab_gens)
    n = _single_n(stab_gens, n)
    r = len(stab_gens)
    etas = [eta_int(p) for p in stab_gens]

    for i in range(r):
        for j in range(i + 1, r):
            if symplectic_int(etas[i], etas[j], n):
                raise NotAbelian(f"generators {i} ({stab_gens[i]}) and {j} ({stab_gens[j]}) anticommute")

    if r and rank(BitMatrix(tuple(etas), 2 * n)) < r:
        raise DependentGenerators(f"{r} generators span fewer than {r} dimensions")

    # row i dotted with t gives ⟨S_i, t⟩
    conjugate_rows = BitMatrix(tuple(swap_halves(s, n) for s in etas), 2 * n)
    pure = [solve(conjugate_rows, BitVector.unit(j, r)).value for j in range(r)]

    if (logical_x is None) != (logical_z is None):
        raise ValueError("logical_x and logical_z must be given together")

    if logical_x is not None:
        xs = [eta_int(p) for p in logical_x]
        zs = [eta_int(p) for p in logical_z]
        _check_explicit_logicals(xs, zs, etas, n)
        for j in range(r):
            for i in range(len(xs)):
                if symplectic_int(pure[j], xs[i], n):
                    pure[j] ^= zs[i]
                if symplectic_int(pure[j], zs[i], n):
                    pure[j] ^= xs[i]

    for j in range(r):
        for i in range(j):
            if symplectic_int(pure[i], pure[j], n):
                pure[j] ^= etas[i]

    if logical_x is None:
        constraints = BitMatrix(tuple(swap_halves(v, n) for v in etas + pure), 2 * n)
        xs, zs = _pair_logicals(list(kernel(constraints).rows), n)

    code = StabilizerCode(
        n=n,
        k=n - r,
        stab_gens=stab_gens,
        logical_x=tuple(from_eta_int(v, n) for v in xs),
        logical_z=tuple(from_eta_int(v, n) for v in zs),
        pure_errors=tuple(from_eta_int(v, n) for v in pure),
    )
    logger.debug("completed %s: pure errors %s", code, [str(p) for p in code.pure_errors])
    return code


def _check_explicit_logicals(xs: list[int], zs: list[int], etas: list[int], n: int) -> None:
    k = n - len(etas)
    if len(xs) != k or len(zs) != k:
        raise LengthMismatch(f"expected {k} logical pairs, got {len(xs)} X and {len(zs)} Z")

    for name, ops in (("X", xs), ("Z", zs)):
        for j, op in enumerate(ops):
            for i, s in enumerate(etas):
                if symplectic_int(op, s, n):
                    raise NotAbelian(f"logical {name}{j} anticommutes with generator {i}")

    for i in range(k):
        for j in range(k):
            expected = int(i == j)
            if (
                symplectic_int(xs[i], zs[j], n) != expected
                or (i != j and symplectic_int(xs[i], xs[j], n))
                or (i != j and symplectic_int(zs[i], zs[j], n))
            ):
                raise NotAbelian(f"logical pair ({i}, {j}) breaks the canonical commutation table")


# ==========================================
# Validation
# ==========================================
def validate(code: StabilizerCode) -> ValidationReport:
    n = code.n
    report = ValidationReport()

    counts = (len(code.stab_gens), len(code.pure_errors), len(code.logical_x), len(code.logical_z))
    report.count_ok = counts == (n - code.k, n - code.k, code.k, code.k)

    s, t = list(code.stab_etas), list(code.pure_etas)
    lx, lz = list(code.logical_x_etas), list(code.logical_z_etas)

    if s and rank(BitMatrix(tuple(s), 2 * n)) < len(s):
        report.dependent = True

    everything = s + t + lx + lz
    report.spans = rank(BitMatrix(tuple(everything), 2 * n)) == 2 * n if everything else n == 0

    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if symplectic_int(s[i], s[j], n):
                report.not_abelian.append((i, j))

    for kind, ops in (("X", lx), ("Z", lz)):
        for j, op in enumerate(ops):
            for i, gen in enumerate(s):
                if symplectic_int(op, gen, n):
                    report.logical_commutation.append((kind, j, i))

    # canonical table; pairs within S and S-vs-logical are reported above
    families = [("S", s), ("T", t), ("X", lx), ("Z", lz)]
    partner = {"S": "T", "T": "S", "X": "Z", "Z": "X"}
    for fa, (a_name, a_ops) in enumerate(families):
        for b_name, b_ops in families[fa:]:
            if (a_name, b_name) in (("S", "S"), ("S", "X"), ("S", "Z")):
                continue
            for i, a in enumerate(a_ops):
                for j, b in enumerate(b_ops):
                    if a_name == b_name and j <= i:
                        continue
                    expected = int(partner[a_name] == b_name and i == j)
                    if symplectic_int(a, b, n) != expected:
                        report.canonical.append((a_name, i, b_name, j))

    return report


# ==========================================
# Syndromes and decomposition
# ==========================================
def _check_n(code: StabilizerCode, e: PauliOperator) -> None:
    if e.n != code.n:
        raise LengthMismatch(f"operator on {e.n} qubits for a code on {code.n}")


def syndrome_int(code: StabilizerCode, e_eta: int) -> int:
    n = code.n
    out = 0
    for j, s in enumerate(code.stab_etas):
        if symplectic_int(e_eta, s, n):
            out |= 1 << j
    return out


def syndrome_of(code: StabilizerCode, e: PauliOperator) -> Syndrome:
    _check_n(code, e)
    return Syndrome.from_int(syndrome_int(code, eta_int(e)), code.r)


def pure_error_int(code: StabilizerCode, s_value: int) -> int:
    out = 0
    for j, t in enumerate(code.pure_etas):
        if (s_value >> j) & 1:
            out ^= t
    return out


def pure_error_for(code: StabilizerCode, s: Syndrome) -> PauliOperator:
    if len(s) != code.r:
        raise LengthMismatch(f"syndrome of length {len(s)} for {code.r} generators")
    return from_eta_int(pure_error_int(code, s.bits.value), code.n)


def logical_int(code: StabilizerCode, label: LogicalLabel) -> int:
    if label.k != code.k:
        raise LengthMismatch(f"label for {label.k} logical qubits on a code with k={code.k}")
    out = 0
    for j in range(code.k):
        if label.x_part[j]:
            out ^= code.logical_x_etas[j]
        if label.z_part[j]:
            out ^= code.logical_z_etas[j]
    return out


def logical_operator(code: StabilizerCode, label: LogicalLabel) -> PauliOperator:
    return from_eta_int(logical_int(code, label), code.n)


def decompose(code: StabilizerCode, e: PauliOperator) -> Decomposition:
    """Split e = T_s · L · S using the dual pairings of the canonical basis."""

    _check_n(code, e)
    n = code.n
    eta = eta_int(e)

    x_part = sum(symplectic_int(eta, z, n) << j for j, z in enumerate(code.logical_z_etas))
    z_part = sum(symplectic_int(eta, x, n) << j for j, x in enumerate(code.logical_x_etas))
    coords = sum(symplectic_int(eta, t, n) << j for j, t in enumerate(code.pure_etas))

    return Decomposition(
        syndrome=Syndrome.from_int(syndrome_int(code, eta), code.r),
        label=LogicalLabel(BitVector(x_part, code.k), BitVector(z_part, code.k)),
        coords=BitVector(coords, code.r),
    )


def recompose(code: StabilizerCode, decomposition: Decomposition) -> PauliOperator:
    eta = pure_error_int(code, decomposition.syndrome.bits.value)
    eta ^= logical_int(code, decomposition.label)
    for j, s in enumerate(code.stab_etas):
        if decomposition.coords[j]:
            eta ^= s
    return from_eta_int(eta, code.n)


def all_labels(k: int) -> list[LogicalLabel]:
    """All 4^k labels in lexicographic (x_part, z_part) order; trivial first."""

    labels = [
        LogicalLabel(BitVector(xv, k), BitVector(zv, k))
        for xv in range(1 << k)
        for zv in range(1 << k)
    ]
    return sorted(labels, key=LogicalLabel.sort_key)


# ==========================================
# Enumeration
# ==========================================
def _require_enumerable(bits: int, what: str) -> None:
    limit = config.max_enum_bits()
    if bits > limit:
        raise TooLarge(f"{what} has 2^{bits} elements, limit is 2^{limit}")


@lru_cache(maxsize=16)
def _stabilizer_elements(code: StabilizerCode) -> tuple[int, ...]:
    return tuple(span_elements(code.stab_etas))


def stabilizer_elements(code: StabilizerCode) -> tuple[int, ...]:
    """η images of all 2^(n-k) stabilizer elements in Gray-code order."""

    # the limit is checked on every call, cached or not
    _require_enumerable(code.r, "stabilizer group")
    return _stabilizer_elements(code)


def enumerate_stabilizer_group(code: StabilizerCode) -> Iterator[PauliOperator]:
    _require_enumerable(code.r, "stabilizer group")
    for eta in span_elements(code.stab_etas):
        yield from_eta_int(eta, code.n)


def enumerate_normalizer(code: StabilizerCode) -> Iterator[PauliOperator]:
    gens = code.stab_etas + code.logical_x_etas + code.logical_z_etas
    _require_enumerable(len(gens), "normalizer")
    for eta in span_elements(gens):
        yield from_eta_int(eta, code.n)


def code_distance(code: StabilizerCode) -> int | None:
    """Minimum qubit weight over N(S) minus S; None when k = 0."""

    if code.k == 0:
        return None

    _require_enumerable(code.r + 2 * code.k, "normalizer")
    n = code.n
    stabilizers = stabilizer_elements(code)
    logicals = code.logical_x_etas + code.logical_z_etas

    best = n
    for logical in span_elements(logicals):
        if logical == 0:
            continue
        best = min(best, min(eta_weight(logical ^ s, n) for s in stabilizers))
    return best


# ==========================================
# Text format
# ==========================================
def parse_code_text(text: str) -> StabilizerCode:
    """Header "n k", then n-k Pauli strings; '#' lines are comments."""

    lines = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    if not lines:
        raise FormatError("code text is empty")

    try:
        n, k = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise FormatError(f"bad header {lines[0]!r}, expected 'n k'") from None

    gens = [PauliOperator.from_string(line) for line in lines[1:]]
    if len(gens) != n - k:
        raise FormatError(f"header says {n - k} generators, found {len(gens)}")
    if any(g.n != n for g in gens):
        raise FormatError(f"every generator must act on {n} qubits")

    return canonical_completion(gens, n=n)


def format_code_text(code: StabilizerCode) -> str:
    lines = [f"{code.n} {code.k}"]
    lines.extend(str(g) for g in code.stab_gens)
    return "\n".join(lines) + "\n"
