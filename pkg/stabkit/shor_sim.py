"""
Shor-lattice blocks that stand in for the Z-only tunable qubit.

An n1 x n2 lattice (qubit (r, c) = r*n2 + c) carries X X on every horizontal
link and Z on every pair of neighbouring rows; Z̄ is Z along row 0 and X̄ is
X down column 0. A Z chain over the first ℓ columns of a row lights up one
link, and under an X-Z channel the ratio between "no further logical" and
"Z̄ on top of the chain" is set by ℓ. Choosing ℓ therefore dials in v.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from stabkit.channel import compose, independent_xz
from stabkit.decoder import class_probabilities, dqmld
from stabkit.errors import OutOfRange
from stabkit.pauli import PauliOperator
from stabkit.reduction import ReductionInstance, q_from_v
from stabkit.stabilizer import (
    LogicalLabel,
    StabilizerCode,
    Syndrome,
    canonical_completion,
    decompose,
    syndrome_of,
)

logger = logging.getLogger(__name__)

CLASS_ORDER = ("I", "X", "Z", "Y")


@dataclass(frozen=True)
class ShorLattice:
    n1: int
    n2: int
    code: StabilizerCode


def _qubit_ops(n1: int, n2: int) -> tuple[list[PauliOperator], PauliOperator, PauliOperator]:
    total = n1 * n2
    gens = []
    for r in range(n1):
        for c in range(n2 - 1):
            x = (1 << (r * n2 + c)) | (1 << (r * n2 + c + 1))
            gens.append(PauliOperator.from_ints(0, x, total))
    row_mask = (1 << n2) - 1
    for r in range(n1 - 1):
        z = (row_mask << (r * n2)) | (row_mask << ((r + 1) * n2))
        gens.append(PauliOperator.from_ints(z, 0, total))

    logical_z = PauliOperator.from_ints(row_mask, 0, total)
    logical_x = PauliOperator.from_ints(0, sum(1 << (r * n2) for r in range(n1)), total)
    return gens, logical_x, logical_z


def build_shor(n1: int, n2: int) -> ShorLattice:
    if n1 < 1 or n2 < 1:
        raise OutOfRange(f"lattice needs n1, n2 >= 1, got ({n1}, {n2})")

    gens, logical_x, logical_z = _qubit_ops(n1, n2)
    code = canonical_completion(gens, n=n1 * n2, logical_x=[logical_x], logical_z=[logical_z])
    return ShorLattice(n1=n1, n2=n2, code=code)


def chain_error(lattice: ShorLattice, ell: int, row: int = 0) -> PauliOperator:
    """Z on columns 0..ℓ-1 of one row."""

    if not 0 <= ell <= lattice.n2:
        raise OutOfRange(f"ℓ must lie in [0, {lattice.n2}], got {ell}")
    if not 0 <= row < lattice.n1:
        raise OutOfRange(f"row must lie in [0, {lattice.n1}), got {row}")

    z = ((1 << ell) - 1) << (row * lattice.n2)
    return PauliOperator.from_ints(z, 0, lattice.n1 * lattice.n2)


# ==========================================
# Class probabilities
# ==========================================
def class_probs_formula(n1: int, n2: int, p: Fraction, ell: int) -> tuple[Fraction, ...]:
    """
    (P_𝕀, P_X̄, P_Z̄, P_Ȳ) relative to the class of the ℓ-chain, normalized
    by the syndrome probability.

    The Z part decides between 𝕀 and Z̄: the chain row ends up either as the
    ℓ-chain or its complement, every other row is either clean or fully
    flipped, and the parity of full flips picks the class. The X part decides
    between 𝕀 and X̄ through the common X-parity of all rows.
    """

    p = Fraction(p)
    if not 0 < p < 1:
        raise OutOfRange(f"p must lie in (0, 1), got {p}")
    if not 0 <= ell <= n2:
        raise OutOfRange(f"ℓ must lie in [0, {n2}], got {ell}")

    t = p / 2
    u = 1 - t
    a = t**ell * u ** (n2 - ell)
    a_bar = t ** (n2 - ell) * u**ell
    e, f = u**n2, t**n2
    m = n1 - 1
    s_even = ((e + f) ** m + (e - f) ** m) / 2
    s_odd = ((e + f) ** m - (e - f) ** m) / 2
    x_even = (1 + (1 - p) ** n2) / 2
    x_odd = (1 - (1 - p) ** n2) / 2

    z_i = a * s_even + a_bar * s_odd
    z_z = a * s_odd + a_bar * s_even
    raw = (z_i * x_even**n1, z_i * x_odd**n1, z_z * x_even**n1, z_z * x_odd**n1)
    total = sum(raw)
    return tuple(value / total for value in raw)


def brute_force_class_probs(
    lattice: ShorLattice, p: Fraction, ell: int, row: int = 0
) -> tuple[Fraction, ...]:
    """Same four numbers from the exhaustive decoder, for cross-checking."""

    chain = chain_error(lattice, ell, row)
    s = syndrome_of(lattice.code, chain)
    offset = decompose(lattice.code, chain).label
    probs = class_probabilities(lattice.code, independent_xz(lattice.n1 * lattice.n2, p), s)

    relative: dict[str, Fraction] = {}
    for label, prob in probs.items():
        rel = LogicalLabel(label.x_part ^ offset.x_part, label.z_part ^ offset.z_part)
        relative[rel.name] = prob

    total = sum(relative.values())
    return tuple(relative[name] / total for name in CLASS_ORDER)


def achieved_ratio(n1: int, n2: int, p: Fraction, ell: int) -> Fraction:
    """P_𝕀 / P_Z̄ at a given integer ℓ."""

    probs = class_probs_formula(n1, n2, p, ell)
    return probs[0] / probs[2]


@dataclass
class EllChoice:
    ell: int
    achieved_ratio: Fraction
    estimate: float


def ell_for_ratio(v: Fraction, p: Fraction, n2: int, n1: int = 1) -> EllChoice:
    """
    The integer ℓ whose exact ratio P_𝕀/P_Z̄ lies nearest to v on a log
    scale. ``estimate`` is the continuous leading-order value
    ½(n2 - log v / log((2-p)/p)). v > 1 is reached by the same scan,
    mirroring ℓ -> n2 - ℓ.
    """

    v, p = Fraction(v), Fraction(p)
    if v <= 0:
        raise OutOfRange(f"v must be positive, got {v}")
    if not 0 < p < Fraction(1, 2):
        raise OutOfRange(f"p must lie in (0, 1/2), got {p}")

    ratios = [achieved_ratio(n1, n2, p, ell) for ell in range(n2 + 1)]
    if not ratios[-1] <= v <= ratios[0]:
        raise OutOfRange(f"v={v} outside the reachable range [{ratios[-1]}, {ratios[0]}] for n2={n2}")

    def log_distance(ratio: Fraction) -> Fraction:
        return max(ratio / v, v / ratio)

    ell = min(range(n2 + 1), key=lambda i: log_distance(ratios[i]))
    estimate = 0.5 * (n2 - math.log(v) / math.log((2 - p) / p))
    return EllChoice(ell=ell, achieved_ratio=ratios[ell], estimate=estimate)


@dataclass
class LeakageReport:
    n1: int
    n2: int
    p: Fraction
    leakage: Fraction
    bound: Fraction | None

    @property
    def informative(self) -> bool:
        return self.bound is not None

    @property
    def ok(self) -> bool | None:
        return None if self.bound is None else self.leakage <= self.bound


def leakage_bound_check(n1: int, n2: int, p: Fraction) -> LeakageReport:
    """
    Exact P_X̄ + P_Ȳ (independent of ℓ) against
    b^-n1 + n2² b^-2n1 / (1 - n2 b^-n1) with b = n2 - 1.
    """

    p = Fraction(p)
    if not 0 < p < Fraction(1, 2):
        raise OutOfRange(f"p must lie in (0, 1/2), got {p}")

    probs = class_probs_formula(n1, n2, p, 0)
    leakage = probs[1] + probs[3]

    bound = None
    base = n2 - 1
    if base > 0:
        tail = Fraction(1, base**n1)
        denominator = 1 - n2 * tail
        if denominator > 0:
            bound = tail + n2**2 * tail**2 / denominator

    return LeakageReport(n1=n1, n2=n2, p=p, leakage=leakage, bound=bound)


# ==========================================
# Concatenation with a reduction instance
# ==========================================
@dataclass(frozen=True)
class ConcatenatedInstance:
    inst: ReductionInstance
    lattice: ShorLattice
    code: StabilizerCode

    @property
    def offset(self) -> int:
        """Index of the first lattice qubit."""

        return self.inst.code.n - 1


def concatenate_tunable(inst: ReductionInstance, n1: int, n2: int) -> ConcatenatedInstance:
    """
    Replace the Z-only qubit of the instance by an n1 x n2 lattice: X on the
    tunable qubit becomes the lattice X̄, Z becomes the lattice Z̄.
    """

    lattice = build_shor(n1, n2)
    keep = inst.code.n - 1
    total = keep + n1 * n2
    tunable = 1 << keep
    inner_x = lattice.code.logical_x[0]
    inner_z = lattice.code.logical_z[0]

    def lift(op: PauliOperator) -> PauliOperator:
        z, x = op.z.value, op.x.value
        out_z, out_x = z & (tunable - 1), x & (tunable - 1)
        if z & tunable:
            out_z |= inner_z.z.value << keep
        if x & tunable:
            out_x |= inner_x.x.value << keep
        return PauliOperator.from_ints(out_z, out_x, total)

    block = [
        PauliOperator.from_ints(g.z.value << keep, g.x.value << keep, total)
        for g in lattice.code.stab_gens
    ]
    gens = [lift(g) for g in inst.code.stab_gens] + block
    code = canonical_completion(
        gens,
        n=total,
        logical_x=[lift(inst.code.logical_x[0])],
        logical_z=[lift(inst.code.logical_z[0])],
    )
    logger.debug("concatenated %s with a (%d, %d) lattice into %s", inst.code, n1, n2, code)
    return ConcatenatedInstance(inst=inst, lattice=lattice, code=code)


@dataclass
class SoundnessReport:
    p: Fraction
    ell: int
    v_achieved: Fraction
    concatenated_winner: str
    heterogeneous_winner: str

    @property
    def ok(self) -> bool:
        return self.concatenated_winner == self.heterogeneous_winner


def concatenation_soundness_check(
    inst: ReductionInstance, n1: int, n2: int, p: Fraction, ell: int
) -> SoundnessReport:
    """
    Decode the concatenated code at the chain syndrome and compare, relative
    to the chain's class, with the heterogeneous instance at q = 1/(1+v).
    """

    p = Fraction(p)
    concat = concatenate_tunable(inst, n1, n2)
    keep = concat.offset

    chain = chain_error(concat.lattice, ell)
    chain_full = PauliOperator.from_ints(chain.z.value << keep, chain.x.value << keep, concat.code.n)
    s: Syndrome = syndrome_of(concat.code, chain_full)
    chain_label = decompose(concat.code, chain_full).label

    ch = compose([inst.channel(p, Fraction(1, 2)).take(0, keep), independent_xz(n1 * n2, p)])
    winner = dqmld(concat.code, ch, s).winner
    relative = LogicalLabel(winner.x_part ^ chain_label.x_part, winner.z_part ^ chain_label.z_part)

    v = achieved_ratio(n1, n2, p, ell)
    reference = dqmld(inst.code, inst.channel(p, q_from_v(v)), inst.zero_syndrome).winner

    return SoundnessReport(
        p=p,
        ell=ell,
        v_achieved=v,
        concatenated_winner=relative.name,
        heterogeneous_winner=reference.name,
    )
