"""
Exact brute-force decoders.

Everything here sums over the full stabilizer group, so it is only meant for
desk-scale codes. Probabilities are joint: P(L, s) = Σ_S Prob(T_s·L·S). The
conditional P(L | s) differs by the common factor P(s), which changes no
decision and no gap ratio.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import pandas as pd

from stabkit import config
from stabkit.channel import ChannelStructure, PauliChannel, independent_xz
from stabkit.errors import LengthMismatch, OutOfRange, TooLarge
from stabkit.gf2_linalg import BitVector, span_elements
from stabkit.pauli import PauliOperator, eta_key, from_eta_int
from stabkit.stabilizer import (
    LogicalLabel,
    StabilizerCode,
    Syndrome,
    all_labels,
    decompose,
    logical_int,
    pure_error_int,
    stabilizer_elements,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CosetEnumerator:
    """counts[i] = number of coset elements with symplectic weight i."""

    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def n(self) -> int:
        return (len(self.counts) - 1) // 2

    def lowest_weight(self) -> int | None:
        return next((i for i, c in enumerate(self.counts) if c), None)

    def polynomial(self, p_tilde: Fraction) -> Fraction:
        """Σ A_i p̃^i."""

        return sum((c * p_tilde**i for i, c in enumerate(self.counts) if c), Fraction(0))


@dataclass
class DecodeResult:
    winner: LogicalLabel
    class_probs: dict[LogicalLabel, Fraction]
    achieved_gap: Fraction

    def to_json(self) -> dict:
        return {
            "winner": self.winner.name,
            "class_probs": {label.name: prob for label, prob in self.class_probs.items()},
            "achieved_gap": self.achieved_gap,
        }


@dataclass
class GapCheckReport:
    syndrome: str
    p_syndrome: Fraction
    ratio: Fraction | None
    ratio_bound: Fraction
    achieved_gap: Fraction
    gap_threshold: Fraction
    qmld_class: str
    dqmld_class: str
    ratio_ok: bool
    agreement_ok: bool

    @property
    def ok(self) -> bool:
        return self.ratio_ok and self.agreement_ok


def p_tilde(p: Fraction) -> Fraction:
    """p/(2-p): the per-bit odds of the independent X-Z channel."""

    return Fraction(p) / (2 - Fraction(p))


def p_from_p_tilde(pt: Fraction) -> Fraction:
    return 2 * Fraction(pt) / (1 + Fraction(pt))


# ==========================================
# Limits and argument checks
# ==========================================
def _check_inputs(code: StabilizerCode, ch: PauliChannel | None, s: Syndrome) -> None:
    if ch is not None and ch.n != code.n:
        raise LengthMismatch(f"channel on {ch.n} qubits for a code on {code.n}")
    if len(s) != code.r:
        raise LengthMismatch(f"syndrome of length {len(s)} for {code.r} generators")


def _check_class_limit(code: StabilizerCode) -> None:
    limit = config.max_logical_qubits()
    if code.k > limit:
        raise TooLarge(f"4^{code.k} logical classes, limit is 4^{limit}")


# ==========================================
# Coset sums
# ==========================================
def _offset(code: StabilizerCode, s: Syndrome, label: LogicalLabel) -> int:
    return pure_error_int(code, s.bits.value) ^ logical_int(code, label)


def coset_enumerator(code: StabilizerCode, s: Syndrome, label: LogicalLabel) -> CosetEnumerator:
    _check_inputs(code, None, s)
    offset = _offset(code, s, label)
    counts = [0] * (2 * code.n + 1)
    for stab in stabilizer_elements(code):
        counts[(offset ^ stab).bit_count()] += 1
    return CosetEnumerator(tuple(counts))


@lru_cache(maxsize=512)
def _signature_tally(
    code: StabilizerCode, offset: int, structure: ChannelStructure
) -> tuple[tuple[tuple[int, ...], int], ...]:
    tally: Counter[tuple[int, ...]] = Counter()
    for stab in stabilizer_elements(code):
        sig = structure.signature(offset ^ stab)
        if sig is not None:
            tally[sig] += 1
    return tuple(tally.items())


def coset_probability(code: StabilizerCode, ch: PauliChannel, offset: int) -> Fraction:
    """
    Σ_S Prob(offset·S), pricing each distinct channel signature once. The
    tally only depends on the channel's structure, so sweeps over p or q
    reuse it.
    """

    stabilizer_elements(code)  # enforces the enumeration limit
    return sum(
        (count * ch.signature_probability(sig) for sig, count in _signature_tally(code, offset, ch.structure)),
        Fraction(0),
    )


def class_probability(
    code: StabilizerCode, ch: PauliChannel, s: Syndrome, label: LogicalLabel
) -> Fraction:
    _check_inputs(code, ch, s)
    return coset_probability(code, ch, _offset(code, s, label))


def class_probabilities(
    code: StabilizerCode, ch: PauliChannel, s: Syndrome
) -> dict[LogicalLabel, Fraction]:
    """Joint probability of every logical class, in lexicographic label order."""

    _check_inputs(code, ch, s)
    _check_class_limit(code)
    return {label: class_probability(code, ch, s, label) for label in all_labels(code.k)}


def evaluate_enumerator(enumerator: CosetEnumerator, p: Fraction) -> Fraction:
    """Weight-enumerator form (1-p/2)^(2n) Σ A_i p̃^i of a class probability."""

    p = Fraction(p)
    return (1 - p / 2) ** (2 * enumerator.n) * enumerator.polynomial(p_tilde(p))


def normalizer_enumerator(code: StabilizerCode) -> CosetEnumerator:
    """Symplectic weight histogram of N(S); it sums to 2^(n+k)."""

    gens = code.stab_etas + code.logical_x_etas + code.logical_z_etas
    limit = config.max_enum_bits()
    if len(gens) > limit:
        raise TooLarge(f"normalizer has 2^{len(gens)} elements, limit is 2^{limit}")

    counts = [0] * (2 * code.n + 1)
    for eta in span_elements(gens):
        counts[eta.bit_count()] += 1
    return CosetEnumerator(tuple(counts))


# ==========================================
# Decoders
# ==========================================
def _decide(probs: Mapping[LogicalLabel, Fraction]) -> tuple[LogicalLabel, Fraction]:
    # probs arrive in lexicographic order; the first maximum wins ties
    winner = None
    best = Fraction(-1)
    for label, prob in probs.items():
        if prob > best:
            winner, best = label, prob

    if len(probs) == 1:
        return winner, Fraction(1)
    if best == 0:
        return winner, Fraction(0)

    runner_up = max(prob for label, prob in probs.items() if label != winner)
    return winner, (best - runner_up) / best


def dqmld(code: StabilizerCode, ch: PauliChannel, s: Syndrome) -> DecodeResult:
    probs = class_probabilities(code, ch, s)
    winner, gap = _decide(probs)
    logger.debug("dqmld s=%s -> %s (gap %s)", s, winner, gap)
    return DecodeResult(winner=winner, class_probs=probs, achieved_gap=gap)


def qmld(code: StabilizerCode, ch: PauliChannel, s: Syndrome) -> PauliOperator:
    """Most probable single error with syndrome s; ties go to the smallest η string."""

    _check_inputs(code, ch, s)
    _check_class_limit(code)
    limit = config.max_enum_bits()
    if code.n + code.k > limit:
        raise TooLarge(f"2^{code.n + code.k} candidate errors, limit is 2^{limit}")

    n = code.n
    base = pure_error_int(code, s.bits.value)
    logicals = code.logical_x_etas + code.logical_z_etas
    stabilizers = stabilizer_elements(code)

    best_eta = None
    best_prob = Fraction(-1)
    best_key = ""
    for logical in span_elements(logicals):
        offset = base ^ logical
        for stab in stabilizers:
            eta = offset ^ stab
            prob = ch.probability_eta(eta)
            if prob < best_prob:
                continue
            key = eta_key(from_eta_int(eta, n))
            if prob > best_prob or key < best_key:
                best_eta, best_prob, best_key = eta, prob, key

    return from_eta_int(best_eta, n)


def large_gap_equivalence_check(
    code: StabilizerCode, ch: PauliChannel, s: Syndrome
) -> GapCheckReport:
    """
    Two exact checks: the class holding the most likely error carries at
    least 2^-(n+k) of P(s), and whenever the class gap is at least
    1 - 2^-(n+k) the most likely error sits in the winning class.
    """

    result = dqmld(code, ch, s)
    best_error = qmld(code, ch, s)
    qmld_label = decompose(code, best_error).label

    p_s = sum(result.class_probs.values(), Fraction(0))
    bound = Fraction(1, 2 ** (code.n + code.k))
    threshold = 1 - bound

    if p_s == 0:
        ratio = None
        ratio_ok = agreement_ok = True
    else:
        ratio = result.class_probs[qmld_label] / p_s
        ratio_ok = ratio >= bound
        agreement_ok = result.achieved_gap < threshold or qmld_label == result.winner

    return GapCheckReport(
        syndrome=str(s),
        p_syndrome=p_s,
        ratio=ratio,
        ratio_bound=bound,
        achieved_gap=result.achieved_gap,
        gap_threshold=threshold,
        qmld_class=qmld_label.name,
        dqmld_class=result.winner.name,
        ratio_ok=ratio_ok,
        agreement_ok=agreement_ok,
    )


# ==========================================
# Enumerator-level decisions (independent X-Z channel)
# ==========================================
def dqmld_from_enumerators(
    enumerators: Mapping[LogicalLabel, CosetEnumerator], p: Fraction
) -> LogicalLabel:
    pt = p_tilde(p)
    ordered = sorted(enumerators, key=LogicalLabel.sort_key)
    winner, _ = _decide({label: enumerators[label].polynomial(pt) for label in ordered})
    return winner


def qmld_class_from_enumerators(
    enumerators: Mapping[LogicalLabel, CosetEnumerator],
) -> LogicalLabel:
    """Class holding the lowest-weight element, which QMLD returns whenever p < 1."""

    ordered = sorted(enumerators, key=LogicalLabel.sort_key)
    return min(
        (label for label in ordered if enumerators[label].lowest_weight() is not None),
        key=lambda label: enumerators[label].lowest_weight(),
    )


def two_class_enumerators(m: int, a: int, b: int, c: int) -> dict[LogicalLabel, CosetEnumerator]:
    """
    Two competing classes with 2^m elements each: the first holds one error of
    weight a and 2^m - 1 of weight b, the second holds 2^m errors of weight c.
    """

    if m < 1 or not 0 <= a < c < b:
        raise OutOfRange(f"need m >= 1 and 0 <= a < c < b, got m={m}, a={a}, b={b}, c={c}")

    size = b + 1 if b % 2 == 0 else b + 2  # odd length 2n+1
    first = [0] * size
    second = [0] * size
    first[a] += 1
    first[b] += 2**m - 1
    second[c] += 2**m

    return {
        LogicalLabel.trivial(1): CosetEnumerator(tuple(first)),
        LogicalLabel(BitVector.zeros(1), BitVector(1, 1)): CosetEnumerator(tuple(second)),
    }


def degeneracy_threshold(m: int, a: int, c: int) -> Fraction:
    """p̃ = 2^(-m/(c-a)) above which the crowded class outweighs the light one."""

    if c <= a:
        raise OutOfRange(f"need c > a, got a={a}, c={c}")
    if m % (c - a):
        raise OutOfRange(f"2^(-{m}/{c - a}) is irrational")
    return Fraction(1, 2 ** (m // (c - a)))


# ==========================================
# Disagreement scan
# ==========================================
def compare_decoders(
    code: StabilizerCode,
    p_grid: Sequence[Fraction],
    syndromes: Sequence[Syndrome] | None = None,
) -> pd.DataFrame:
    """QMLD class vs DQMLD winner over syndromes x an independent X-Z p grid."""

    if syndromes is None:
        syndromes = [Syndrome.from_int(v, code.r) for v in range(2**code.r)]

    rows = []
    for p in p_grid:
        ch = independent_xz(code.n, p)
        for s in syndromes:
            result = dqmld(code, ch, s)
            q_label = decompose(code, qmld(code, ch, s)).label
            rows.append({
                "p": Fraction(p),
                "syndrome": str(s),
                "qmld_class": q_label.name,
                "dqmld_class": result.winner.name,
                "achieved_gap": result.achieved_gap,
                "agree": q_label == result.winner,
            })

    logger.info("compared decoders on %d (p, syndrome) pairs", len(rows))
    return pd.DataFrame(rows, columns=["p", "syndrome", "qmld_class", "dqmld_class", "achieved_gap", "agree"])
