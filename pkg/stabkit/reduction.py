"""
Weight enumerators of a classical code, read off a DQMLD oracle.

A classical [n, k] code C is turned into a one-logical-qubit stabilizer code
whose trivial class at zero syndrome has probability ∝ (1-q)·W(p̃) and whose
Z̄ class has probability ∝ q·B_g(p̃), where W is the weight-enumerator
polynomial of C and B_g that of the coset C + g. Every p at which the
oracle's answer flips from 𝕀 to Z̄ (at v = (1-q)/q) gives one linear
equation B_g(p̃) = v·W(p̃).

One instance only fixes the ratio B_g/W, and W and B_g may share a factor.
So there is one instance per coset C + g ≠ C, and the cosets partition the
space: W = (1+x)^n - Σ_g B_g. Substituting that identity leaves the B_g as
the only unknowns, and 2n+1 crossings per instance determine them uniquely.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from stabkit import config
from stabkit.channel import PauliChannel, xz_layout
from stabkit.decoder import class_probability, dqmld, p_tilde
from stabkit.errors import (
    Exhausted,
    LengthMismatch,
    NoCrossing,
    OracleError,
    OutOfRange,
    PostCheckFailed,
    RankDeficient,
    RoundingAmbiguous,
    SingularSystem,
    TooLarge,
)
from stabkit.exact import least_squares_rational, nearest_integer, rational_rank
from stabkit.gf2_linalg import BitMatrix, BitVector, complete_basis, invert, rank, span_elements
from stabkit.pauli import PauliOperator
from stabkit.stabilizer import LogicalLabel, StabilizerCode, Syndrome, canonical_completion

logger = logging.getLogger(__name__)

TRIVIAL = "I"
FLIPPED = "Z"


# ==========================================
# Classical codes
# ==========================================
@dataclass(frozen=True)
class ClassicalCode:
    G: BitMatrix

    def __post_init__(self) -> None:
        if rank(self.G) < self.G.nrows:
            raise RankDeficient(f"generator matrix has rank {rank(self.G)} < {self.G.nrows} rows")

    @property
    def n(self) -> int:
        return self.G.ncols

    @property
    def k(self) -> int:
        return self.G.nrows

    @classmethod
    def from_text(cls, text: str) -> ClassicalCode:
        return cls(BitMatrix.from_text(text))

    def padded(self) -> ClassicalCode:
        """Same codewords with one extra all-zero coordinate appended."""

        return ClassicalCode(BitMatrix(self.G.rows, self.n + 1))

    def __str__(self) -> str:
        return f"[{self.n},{self.k}] code"


def _weight_histogram(n: int, words: Iterable[int]) -> tuple[int, ...]:
    counts = [0] * (n + 1)
    for word in words:
        counts[word.bit_count()] += 1
    return tuple(counts)


def _require_classical_limit(c: ClassicalCode) -> None:
    limit = config.max_classical_dimension()
    if c.k > limit:
        raise TooLarge(f"2^{c.k} codewords, limit is 2^{limit}")


def brute_force_we(c: ClassicalCode) -> tuple[int, ...]:
    """Hamming weight histogram over all 2^k codewords."""

    _require_classical_limit(c)
    return _weight_histogram(c.n, span_elements(c.G.rows))


def affine_weight_enumerator(c: ClassicalCode, offset: BitVector) -> tuple[int, ...]:
    """Weight histogram of the coset C + offset."""

    _require_classical_limit(c)
    return _weight_histogram(c.n, (word ^ offset.value for word in span_elements(c.G.rows)))


def _instance_code(c: ClassicalCode) -> ClassicalCode:
    # a k = n code has no complement, so it gets one zero coordinate
    return c.padded() if c.k == c.n else c


def complement_vectors(c: ClassicalCode) -> list[BitVector]:
    """
    One vector from every coset of the (padded) code other than the code
    itself. The first is the default complement row used by build_instance.
    """

    classical = _instance_code(c)
    basis = complete_basis(classical.G)
    limit = config.max_coset_bits()
    if basis.nrows > limit:
        raise TooLarge(f"2^{basis.nrows} - 1 coset instances, limit is 2^{limit} - 1")

    default = basis.rows[-1]
    others = sorted(v for v in span_elements(basis.rows) if v and v != default)
    return [BitVector(v, classical.n) for v in [default, *others]]


# ==========================================
# Instance
# ==========================================
@dataclass(frozen=True)
class ReductionInstance:
    source: ClassicalCode
    classical: ClassicalCode
    padded: bool
    code: StabilizerCode
    g_n: BitVector
    h_n: BitVector
    d_coset: int

    @property
    def n(self) -> int:
        """Length of the (possibly padded) classical code."""

        return self.classical.n

    @property
    def k(self) -> int:
        return self.classical.k

    @property
    def zero_syndrome(self) -> Syndrome:
        return Syndrome.zero(self.code.r)

    def channel(self, p: Fraction, q: Fraction) -> PauliChannel:
        """X-Z(p) on the n data qubits, n-k error-free qubits, Z-only(q) last."""

        return xz_layout(Fraction(p), Fraction(q), self.n, self.n - self.k)

    @property
    def v_bound(self) -> Fraction:
        """Largest v for which a crossing in (0, 1/n] is guaranteed."""

        return Fraction(1, (2 * self.n - 1) ** self.d_coset)

    @property
    def v_max(self) -> Fraction:
        return self.v_bound / 2

    @property
    def v_spacing(self) -> Fraction:
        """Minimum distance between two v's in one schedule."""

        return Fraction(1, 8 * self.n**2 * self.n**self.n)

    @property
    def bisection_steps(self) -> int:
        """⌈2n log₂ n⌉, computed exactly."""

        return max(1, (self.n ** (2 * self.n) - 1).bit_length())

    @property
    def crossing_width(self) -> Fraction:
        """4^(-n log₂ n) = n^(-2n)."""

        return Fraction(1, self.n ** (2 * self.n))

    @property
    def max_crossings(self) -> int:
        return (2 * self.n + 1) ** 2

    @property
    def query_budget(self) -> int:
        return self.max_crossings * (self.bisection_steps + 4)


def _z_on(bits: int, extra: Sequence[int], total: int) -> PauliOperator:
    z = bits
    for q in extra:
        z |= 1 << q
    return PauliOperator.from_ints(z, 0, total)


def _x_on(bits: int, extra: Sequence[int], total: int) -> PauliOperator:
    x = bits
    for q in extra:
        x |= 1 << q
    return PauliOperator.from_ints(0, x, total)


def build_instance(c: ClassicalCode, g_n: BitVector | None = None) -> ReductionInstance:
    """
    Qubits 0..n-1 carry the classical coordinates, qubits n..2n-k-2 pair up
    with the complement rows g_{k+1}..g_{n-1}, and the last two qubits a, b
    host the tunable logical qubit:

        Z^{g_i}                      i = 1..k
        Z^{g_{k+i}} Z_{n+i-1}        i = 1..n-k-1
        X^{h_{k+i}} X_{n+i-1}        i = 1..n-k-1
        Z^{g_n} Z_a,  X^{h_n} X_a X_b
        Z̄ = Z^{g_n} Z_b,  X̄ = X^{h_n} X_a

    where the rows h_i of H = (G̃^{-1})ᵀ satisfy g_i·h_j = δ_ij. g_n picks
    the coset C + g_n whose enumerator the Z̄ class carries; by default it
    is the last complement row. A code with k = n has no complement row, so
    it is padded with one zero coordinate.
    """

    padded = c.k == c.n
    classical = _instance_code(c)
    n, k = classical.n, classical.k

    if g_n is None:
        g_n = complete_basis(classical.G).row(-1)
    if len(g_n) != n:
        raise LengthMismatch(f"complement vector of length {len(g_n)} for a length-{n} code")

    g_row = BitMatrix((g_n.value,), n)
    extended = classical.G.stack(g_row)
    if rank(extended) == k:
        raise RankDeficient(f"{g_n} lies in the code and names no coset")

    g_tilde = classical.G.stack(complete_basis(extended)).stack(g_row)
    h = invert(g_tilde).transpose()

    total = 2 * n - k + 1
    a, b = total - 2, total - 1

    gens = [_z_on(g_tilde.rows[i], (), total) for i in range(k)]
    for i in range(1, n - k):
        gens.append(_z_on(g_tilde.rows[k + i - 1], (n + i - 1,), total))
        gens.append(_x_on(h.rows[k + i - 1], (n + i - 1,), total))
    gens.append(_z_on(g_tilde.rows[n - 1], (a,), total))
    gens.append(_x_on(h.rows[n - 1], (a, b), total))

    logical_z = _z_on(g_tilde.rows[n - 1], (b,), total)
    logical_x = _x_on(h.rows[n - 1], (a,), total)

    code = canonical_completion(gens, n=total, logical_x=[logical_x], logical_z=[logical_z])

    coset = affine_weight_enumerator(classical, g_n)
    d_coset = next(i for i, count in enumerate(coset) if count)

    logger.info("built %s instance for %s on coset %s (d_coset=%d, padded=%s)", code, c, g_n, d_coset, padded)
    return ReductionInstance(
        source=c,
        classical=classical,
        padded=padded,
        code=code,
        g_n=g_n,
        h_n=h.row(n - 1),
        d_coset=d_coset,
    )


def build_instances(c: ClassicalCode) -> list[ReductionInstance]:
    """One instance per coset of C other than C, default complement first."""

    return [build_instance(c, g) for g in complement_vectors(c)]


def _labels() -> tuple[LogicalLabel, LogicalLabel]:
    return LogicalLabel.trivial(1), LogicalLabel.from_name("Z")


def q_from_v(v: Fraction) -> Fraction:
    return 1 / (1 + Fraction(v))


# ==========================================
# Oracle
# ==========================================
def oracle_query(inst: ReductionInstance, p: Fraction, q: Fraction) -> LogicalLabel:
    """DQMLD winner at zero syndrome; only the label leaves this function."""

    p, q = Fraction(p), Fraction(q)
    if not 0 < p <= Fraction(1, inst.n):
        raise OutOfRange(f"p must lie in (0, 1/{inst.n}], got {p}")
    if not 0 < q < 1:
        raise OutOfRange(f"q must lie in (0, 1), got {q}")

    winner = dqmld(inst.code, inst.channel(p, q), inst.zero_syndrome).winner
    if winner not in _labels():
        raise OracleError(f"oracle answered {winner} at p={p}, q={q}")
    return winner


QueryFn = Callable[[ReductionInstance, Fraction, Fraction], LogicalLabel]


@dataclass
class QueryRecord:
    v: Fraction
    p: Fraction
    p_lo: Fraction
    p_hi: Fraction
    answer: str
    coset: int = 0


@dataclass
class DecoderOracle:
    """Counts oracle calls and keeps one record per query."""

    inst: ReductionInstance
    query_fn: QueryFn = oracle_query
    coset: int = 0
    records: list[QueryRecord] = field(default_factory=list)

    @property
    def queries(self) -> int:
        return len(self.records)

    def query(self, p: Fraction, v: Fraction, bracket: tuple[Fraction, Fraction]) -> str:
        label = self.query_fn(self.inst, p, q_from_v(v))
        answer = TRIVIAL if label.is_trivial() else FLIPPED
        self.records.append(
            QueryRecord(v=v, p=p, p_lo=bracket[0], p_hi=bracket[1], answer=answer, coset=self.coset)
        )
        logger.debug("coset %d query v=%s p=%s -> %s", self.coset, v, p, answer)
        return answer


# ==========================================
# Crossings
# ==========================================
@dataclass(frozen=True)
class CrossingPoint:
    v: Fraction
    p_lo: Fraction
    p_hi: Fraction
    queries: int
    p_mid: Fraction | None = None

    def __post_init__(self) -> None:
        if self.p_mid is None:
            object.__setattr__(self, "p_mid", (self.p_lo + self.p_hi) / 2)

    @property
    def width(self) -> Fraction:
        return self.p_hi - self.p_lo


def _bisect(
    oracle: DecoderOracle, v: Fraction, lo: Fraction, hi: Fraction, steps: int
) -> tuple[Fraction, Fraction]:
    for _ in range(steps):
        mid = (lo + hi) / 2
        if oracle.query(mid, v, (lo, hi)) == TRIVIAL:
            lo = mid
        else:
            hi = mid
    return lo, hi


def find_crossing(
    inst: ReductionInstance,
    v: Fraction,
    oracle: DecoderOracle | None = None,
    steps: int | None = None,
) -> CrossingPoint:
    """
    Bracket the unique p in (0, 1/n] where the answer flips from 𝕀 to Z̄.

    The left end ε = 2^-(j+8) sits on the 𝕀 side because the constant term
    of W dominates there; the right end 1/n is on the Z̄ side whenever v is
    below the instance's bound. j + 2 queries in total. Every call bisects
    the same dyadic grid, so p_mid never decreases as v grows.
    """

    v = Fraction(v)
    if v <= 0:
        raise OutOfRange(f"v must be positive, got {v}")

    oracle = oracle or DecoderOracle(inst)
    steps = inst.bisection_steps if steps is None else steps
    start = oracle.queries

    lo = Fraction(1, 2 ** (inst.bisection_steps + 8))
    hi = Fraction(1, inst.n)
    if oracle.query(lo, v, (lo, hi)) != TRIVIAL:
        raise NoCrossing(f"v={v}: oracle already answers Z̄ at p={lo}")
    if oracle.query(hi, v, (lo, hi)) != FLIPPED:
        raise NoCrossing(f"v={v}: oracle still answers 𝕀 at p=1/{inst.n}")

    lo, hi = _bisect(oracle, v, lo, hi, steps)
    return CrossingPoint(v=v, p_lo=lo, p_hi=hi, queries=oracle.queries - start)


def refine_crossing(
    inst: ReductionInstance,
    crossing: CrossingPoint,
    extra_steps: int,
    oracle: DecoderOracle | None = None,
) -> CrossingPoint:
    oracle = oracle or DecoderOracle(inst)
    lo, hi = _bisect(oracle, crossing.v, crossing.p_lo, crossing.p_hi, extra_steps)
    return CrossingPoint(v=crossing.v, p_lo=lo, p_hi=hi, queries=crossing.queries + extra_steps)


# ==========================================
# Exact checks on the instance
# ==========================================
def _poly(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def instance_enumerators(inst: ReductionInstance) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(WE, B) of the (padded) classical code by brute force, for validation only."""

    return brute_force_we(inst.classical), affine_weight_enumerator(inst.classical, inst.g_n)


@dataclass
class IdentityReport:
    p: Fraction
    q: Fraction
    decoder_trivial: Fraction
    formula_trivial: Fraction
    decoder_flipped: Fraction
    formula_flipped: Fraction

    @property
    def ok(self) -> bool:
        return (
            self.decoder_trivial == self.formula_trivial
            and self.decoder_flipped == self.formula_flipped
        )


def trivial_class_probability_identity(
    inst: ReductionInstance, p: Fraction, q: Fraction
) -> IdentityReport:
    p, q = Fraction(p), Fraction(q)
    we, b = instance_enumerators(inst)
    ch = inst.channel(p, q)
    trivial, flipped = _labels()

    norm = (1 - p / 2) ** (2 * inst.n)
    pt = p_tilde(p)
    return IdentityReport(
        p=p,
        q=q,
        decoder_trivial=class_probability(inst.code, ch, inst.zero_syndrome, trivial),
        formula_trivial=(1 - q) * norm * _poly(we, pt),
        decoder_flipped=class_probability(inst.code, ch, inst.zero_syndrome, flipped),
        formula_flipped=q * norm * _poly(b, pt),
    )


def default_grid(inst: ReductionInstance, points: int) -> list[Fraction]:
    return [Fraction(i, points * inst.n) for i in range(1, points + 1)]


@dataclass
class MonotonicityReport:
    points: int
    trivial_decreasing: bool
    flipped_increasing: bool
    first_violation: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.trivial_decreasing and self.flipped_increasing


def monotonicity_check(
    inst: ReductionInstance,
    grid: Sequence[Fraction] | None = None,
    points: int = 200,
    q: Fraction = Fraction(1, 2),
) -> MonotonicityReport:
    """P(𝕀, 0) strictly decreasing and P(Z̄, 0) strictly increasing in p, as the decoder sees them."""

    grid = list(grid) if grid is not None else default_grid(inst, points)
    trivial, flipped = _labels()
    s = inst.zero_syndrome

    report = MonotonicityReport(points=len(grid), trivial_decreasing=True, flipped_increasing=True)
    prev = None
    for p in grid:
        ch = inst.channel(p, q)
        cur = (class_probability(inst.code, ch, s, trivial), class_probability(inst.code, ch, s, flipped))
        if prev is not None:
            if cur[0] >= prev[0]:
                report.trivial_decreasing = False
            if cur[1] <= prev[1]:
                report.flipped_increasing = False
            if not report.ok and report.first_violation is None:
                report.first_violation = p
        prev = cur
    return report


@dataclass
class UniquenessReport:
    v: Fraction
    points: int
    sign_changes: int
    change_after: Fraction | None

    @property
    def ok(self) -> bool:
        return self.sign_changes == 1


def crossing_uniqueness_check(
    inst: ReductionInstance,
    v: Fraction,
    grid: Sequence[Fraction] | None = None,
    points: int = 200,
) -> UniquenessReport:
    """Count sign changes of v·W(p̃) - B(p̃) over a rational grid."""

    v = Fraction(v)
    grid = list(grid) if grid is not None else default_grid(inst, points)
    we, b = instance_enumerators(inst)

    changes = 0
    change_after = None
    prev_sign = None
    for p in grid:
        pt = p_tilde(p)
        sign = v * _poly(we, pt) - _poly(b, pt) >= 0
        if prev_sign is not None and sign != prev_sign:
            changes += 1
            change_after = change_after or p
        prev_sign = sign
    return UniquenessReport(v=v, points=len(grid), sign_changes=changes, change_after=change_after)


def crossing_ratio_bound_check(inst: ReductionInstance, p: Fraction) -> bool:
    """B(p̃)/W(p̃) ≥ p̃^d_coset, i.e. P(Z̄)/P(𝕀) at v = 1."""

    we, b = instance_enumerators(inst)
    pt = p_tilde(Fraction(p))
    return _poly(b, pt) >= pt**inst.d_coset * _poly(we, pt)


# ==========================================
# Constraint system
# ==========================================
def constraint_row(n: int, crossing: CrossingPoint) -> list[Fraction]:
    """B(p̃) - v·W(p̃) = 0 for a single instance, on (B_0..B_n, WE_0..WE_n)."""

    pt = p_tilde(crossing.p_mid)
    powers = [pt**i for i in range(n + 1)]
    return powers + [-crossing.v * x for x in powers]


def coset_row(n: int, cosets: int, j: int, crossing: CrossingPoint) -> tuple[list[Fraction], Fraction]:
    """
    B_j(p̃) + v·Σ_h B_h(p̃) = v·(1+p̃)^n, which is B_j = v·W once
    W = (1+p̃)^n - Σ_h B_h is substituted.
    """

    pt = p_tilde(crossing.p_mid)
    v = crossing.v
    powers = [pt**i for i in range(n + 1)]

    row: list[Fraction] = []
    for h in range(cosets):
        scale = 1 + v if h == j else v
        row.extend(scale * x for x in powers)
    return row, v * (1 + pt) ** n


@dataclass
class ConstraintSystem:
    n: int
    k: int
    crossings: list[list[CrossingPoint]]
    matrix: list[list[Fraction]]
    rhs: list[Fraction]

    @property
    def cosets(self) -> int:
        return len(self.crossings)

    @property
    def size(self) -> int:
        return self.cosets * (self.n + 1)

    def rank(self) -> int:
        return rational_rank(self.matrix)


def assemble_constraints(
    inst: ReductionInstance, crossings: Sequence[Sequence[CrossingPoint]]
) -> ConstraintSystem:
    """
    Unknowns are the coset enumerators B_g, one block of n+1 per instance,
    in the order of complement_vectors. Rows: one per crossing, then
    B_g,0 = 0 and Σ_i B_g,i = 2^k for every coset.
    """

    n, k = inst.n, inst.k
    cosets = len(crossings)
    if cosets != 2 ** (n - k) - 1:
        raise LengthMismatch(f"{cosets} crossing sets for the {2 ** (n - k) - 1} cosets of a {n}-bit code")

    width = cosets * (n + 1)
    matrix: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for j, points in enumerate(crossings):
        for cp in points:
            row, value = coset_row(n, cosets, j, cp)
            matrix.append(row)
            rhs.append(value)

    for j in range(cosets):
        start = j * (n + 1)
        zero_weight = [Fraction(0)] * width
        zero_weight[start] = Fraction(1)
        size = [Fraction(1) if start <= i < start + n + 1 else Fraction(0) for i in range(width)]
        matrix.extend([zero_weight, size])
        rhs.extend([Fraction(0), Fraction(2**k)])

    return ConstraintSystem(n=n, k=k, crossings=[list(p) for p in crossings], matrix=matrix, rhs=rhs)


def geometric_schedule(inst: ReductionInstance) -> list[Fraction]:
    return [inst.v_max / 2**l for l in range(2 * inst.n + 1)]


def _resample(inst: ReductionInstance, used: Sequence[Fraction]) -> Fraction:
    # midpoint of the widest gap among the used v's and the admissible bound
    points = sorted(set(used) | {inst.v_bound})
    gaps = [(hi - lo, lo, hi) for lo, hi in zip(points, points[1:])]
    if not gaps:
        return inst.v_max
    width, lo, hi = max(gaps)
    if width < 2 * inst.v_spacing:
        raise Exhausted("no room left in the admissible v range")
    return (lo + hi) / 2


@dataclass
class IndependenceResult:
    crossings: list[CrossingPoint]
    v_schedule: list[Fraction]
    resampled: list[Fraction]
    consumed: int


def ensure_independence(
    inst: ReductionInstance,
    oracle: DecoderOracle | None = None,
    schedule: Sequence[Fraction] | None = None,
    crossings: Sequence[CrossingPoint] = (),
) -> IndependenceResult:
    """
    Add crossings one at a time until 2n+1 single-instance rows plus an
    all-ones row have full rank. A crossing whose row is dependent is
    dropped and its v replaced by the midpoint of the widest free gap.
    """

    oracle = oracle or DecoderOracle(inst)
    n = inst.n
    needed = 2 * n + 1
    accepted = list(crossings)
    pending = list(schedule) if schedule is not None else geometric_schedule(inst)
    used = [c.v for c in accepted]
    resampled: list[Fraction] = []
    consumed = 0
    ones = [Fraction(1)] * (2 * n + 2)

    while len(accepted) < needed:
        if consumed >= inst.max_crossings:
            raise Exhausted(f"{consumed} crossings consumed without {needed} independent rows")

        v = pending.pop(0) if pending else _resample(inst, used)
        crossing = find_crossing(inst, v, oracle)
        consumed += 1

        rows = [constraint_row(n, c) for c in accepted] + [constraint_row(n, crossing), ones]
        if rational_rank(rows) == len(rows):
            accepted.append(crossing)
            used.append(v)
            continue

        logger.info("crossing at v=%s is dependent, resampling", v)
        replacement = _resample(inst, used + [v])
        resampled.append(replacement)
        pending.insert(0, replacement)

    return IndependenceResult(
        crossings=accepted,
        v_schedule=[c.v for c in accepted],
        resampled=resampled,
        consumed=consumed,
    )


class WeightEnumerators(NamedTuple):
    we: tuple[int, ...]
    b: tuple[int, ...]
    cosets: tuple[tuple[int, ...], ...] = ()


def _bracket_consistent(
    we: Sequence[int], b: Sequence[int], crossings: Sequence[CrossingPoint]
) -> bool:
    for c in crossings:
        lo, hi = p_tilde(c.p_lo), p_tilde(c.p_hi)
        if c.v * _poly(we, lo) < _poly(b, lo):
            return False
        if c.v * _poly(we, hi) >= _poly(b, hi):
            return False
    return True


def round_weight_enumerators(system: ConstraintSystem, omega: Sequence[Fraction]) -> WeightEnumerators:
    """
    Round a solution to the nearest integers and post-check it. A component
    1/4 or more from an integer means the crossings are not accurate enough.
    """

    rounded = []
    for i, value in enumerate(omega):
        nearest, distance = nearest_integer(value)
        if distance >= Fraction(1, 4):
            raise RoundingAmbiguous(f"component {i} = {float(value):.6g} is {float(distance):.3g} from an integer")
        rounded.append(nearest)

    n, k = system.n, system.k
    blocks = tuple(tuple(rounded[j * (n + 1): (j + 1) * (n + 1)]) for j in range(system.cosets))
    we = tuple(math.comb(n, i) - sum(b[i] for b in blocks) for i in range(n + 1))

    if any(x < 0 for x in we) or any(x < 0 for b in blocks for x in b):
        raise PostCheckFailed(f"negative coefficient in WE={we}, B={blocks}")
    if we[0] != 1 or any(b[0] != 0 for b in blocks):
        raise PostCheckFailed(f"expected WE_0 = 1 and every B_0 = 0, got WE={we}, B={blocks}")
    if sum(we) != 2**k or any(sum(b) != 2**k for b in blocks):
        raise PostCheckFailed(f"every enumerator must sum to {2**k}, got WE={we}, B={blocks}")
    for j, b in enumerate(blocks):
        if not _bracket_consistent(we, b, system.crossings[j]):
            raise PostCheckFailed(f"rounded enumerators contradict a recorded answer on coset {j}")

    return WeightEnumerators(we=we, b=blocks[0], cosets=blocks)


def solve_weight_enumerators(system: ConstraintSystem) -> WeightEnumerators:
    """Exact least-squares solve, then rounding and post-checks."""

    return round_weight_enumerators(system, least_squares_rational(system.matrix, system.rhs))


# ==========================================
# Pipeline
# ==========================================
@dataclass
class CrossingRecord:
    coset: int
    v: Fraction
    p_lo: Fraction
    p_hi: Fraction
    p_mid: Fraction
    queries: int


@dataclass
class ReductionTranscript:
    n: int
    k: int
    padded: bool
    cosets: list[str] = field(default_factory=list)
    d_coset: list[int] = field(default_factory=list)
    v_schedule: list[list[Fraction]] = field(default_factory=list)
    resampled: list[Fraction] = field(default_factory=list)
    crossings_consumed: int = 0
    refinement_rounds: int = 0
    crossings: list[CrossingRecord] = field(default_factory=list)
    queries: list[QueryRecord] = field(default_factory=list)
    omega: list[Fraction] = field(default_factory=list)
    total_queries: int = 0
    query_budget: int = 0


@dataclass
class ReductionResult:
    we: tuple[int, ...]
    b: tuple[int, ...]
    cosets: tuple[tuple[int, ...], ...]
    transcript: ReductionTranscript
    instances: list[ReductionInstance]
    crossings: list[list[CrossingPoint]]


def run_reduction(c: ClassicalCode, query_fn: QueryFn = oracle_query) -> ReductionResult:
    instances = build_instances(c)
    oracles = [DecoderOracle(inst, query_fn, coset=j) for j, inst in enumerate(instances)]
    first = instances[0]
    transcript = ReductionTranscript(
        n=first.n,
        k=first.k,
        padded=first.padded,
        cosets=[inst.g_n.to_string() for inst in instances],
        d_coset=[inst.d_coset for inst in instances],
        query_budget=sum(inst.query_budget for inst in instances),
    )

    crossings: list[list[CrossingPoint]] = []
    for inst, oracle in zip(instances, oracles):
        found = ensure_independence(inst, oracle)
        crossings.append(found.crossings)
        transcript.v_schedule.append(found.v_schedule)
        transcript.resampled.extend(found.resampled)
        transcript.crossings_consumed += found.consumed

    steps = first.bisection_steps
    while True:
        system = assemble_constraints(first, crossings)
        try:
            omega = least_squares_rational(system.matrix, system.rhs)
            result = round_weight_enumerators(system, omega)
            break
        except (RoundingAmbiguous, PostCheckFailed, SingularSystem) as exc:
            spent = sum(o.queries for o in oracles)
            if spent + steps * sum(len(points) for points in crossings) > transcript.query_budget:
                raise Exhausted(f"query budget {transcript.query_budget} spent: {exc}") from exc
            logger.info("refining %d crossing sets by %d bits: %s", len(crossings), steps, exc)
            crossings = [
                [refine_crossing(inst, cp, steps, oracle) for cp in points]
                for inst, oracle, points in zip(instances, oracles, crossings)
            ]
            transcript.refinement_rounds += 1

    we = result.we
    if first.padded:
        if we[-1] != 0:
            raise PostCheckFailed(f"padded coordinate carries weight: WE={we}")
        we = we[:-1]

    transcript.omega = list(omega)
    transcript.crossings = [
        CrossingRecord(coset=j, v=cp.v, p_lo=cp.p_lo, p_hi=cp.p_hi, p_mid=cp.p_mid, queries=cp.queries)
        for j, points in enumerate(crossings)
        for cp in points
    ]
    transcript.queries = [record for oracle in oracles for record in oracle.records]
    transcript.total_queries = len(transcript.queries)

    logger.info(
        "extracted WE=%s for %s over %d cosets with %d queries in %d refinement rounds",
        we, c, len(instances), transcript.total_queries, transcript.refinement_rounds,
    )
    return ReductionResult(
        we=we,
        b=result.b,
        cosets=result.cosets,
        transcript=transcript,
        instances=instances,
        crossings=crossings,
    )


# ==========================================
# Rounding robustness
# ==========================================
def rounding_gap_budget(n: int, lam: int) -> Fraction:
    """Promise-gap budget 2/(2 + n^λ) under which the first λ coefficients still round correctly."""

    return Fraction(2, 2 + n**lam)


@dataclass
class RobustnessReport:
    trials: int
    delta: Fraction
    correct: int = 0
    detected: int = 0
    wrong: int = 0

    @property
    def ok(self) -> bool:
        return self.wrong == 0


def rounding_robustness_check(
    instances: Sequence[ReductionInstance],
    crossings: Sequence[Sequence[CrossingPoint]],
    trials: int = 10,
    seed: int = 0,
    delta: Fraction | None = None,
) -> RobustnessReport:
    """
    Solve again with every equation's v replaced by v·(1 + u·Δ), u uniform
    in [-1, 1], as a decoder whose gap promise is only Δ would give it. The
    post-checks still compare against the recorded oracle answers. Each
    trial either recovers the true enumerators, is rejected by rounding or
    the post-checks, or (never acceptable) returns wrong integers.
    """

    first = instances[0]
    rng = np.random.default_rng(seed)
    delta = rounding_gap_budget(first.n, first.n) if delta is None else Fraction(delta)
    truth = [instance_enumerators(inst) for inst in instances]
    true_we = truth[0][0]
    true_cosets = tuple(b for _, b in truth)
    report = RobustnessReport(trials=trials, delta=delta)

    for _ in range(trials):
        moved = [
            [
                dataclasses.replace(cp, v=cp.v * (1 + Fraction(float(rng.uniform(-1.0, 1.0))) * delta))
                for cp in points
            ]
            for points in crossings
        ]
        system = dataclasses.replace(
            assemble_constraints(first, moved), crossings=[list(points) for points in crossings]
        )
        try:
            got = solve_weight_enumerators(system)
        except (RoundingAmbiguous, PostCheckFailed, SingularSystem):
            report.detected += 1
            continue
        if got.we == true_we and got.cosets == true_cosets:
            report.correct += 1
        else:
            report.wrong += 1

    logger.info("robustness at Δ=%s: %s", delta, report)
    return report
