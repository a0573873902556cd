from fractions import Fraction as F

import numpy as np
import pytest

from stabkit.channel import compose, depolarizing, independent_xz, z_only
from stabkit.decoder import (
    class_probabilities,
    class_probability,
    compare_decoders,
    coset_enumerator,
    degeneracy_threshold,
    dqmld,
    dqmld_from_enumerators,
    evaluate_enumerator,
    large_gap_equivalence_check,
    normalizer_enumerator,
    p_from_p_tilde,
    p_tilde,
    qmld,
    qmld_class_from_enumerators,
    two_class_enumerators,
)
from stabkit.errors import LengthMismatch, OutOfRange, TooLarge
from stabkit.pauli import eta_key, from_eta_int
from stabkit.stabilizer import LogicalLabel, Syndrome, all_labels, canonical_completion, syndrome_int

from tests.conftest import ops, random_code

TRIVIAL = LogicalLabel.trivial(1)
Z_LABEL = LogicalLabel.from_name("Z")


def all_syndromes(code):
    return [Syndrome.from_int(v, code.r) for v in range(2**code.r)]


class TestCosetEnumerator:

    def test_bitflip_trivial_coset(self, bitflip):
        e = coset_enumerator(bitflip, Syndrome.zero(2), TRIVIAL)
        assert e.counts == (1, 0, 3, 0, 0, 0, 0)
        assert e.lowest_weight() == 0

    def test_shor_trivial_coset(self, shor9):
        e = coset_enumerator(shor9, Syndrome.zero(8), TRIVIAL)
        assert e.counts[0] == 1
        assert e.total == 256

    @pytest.mark.parametrize("fixture", ["bitflip", "toric2"])
    def test_every_coset_has_full_size(self, fixture, request):
        code = request.getfixturevalue(fixture)
        for s in all_syndromes(code):
            for label in all_labels(code.k):
                assert coset_enumerator(code, s, label).total == 2**code.r

    @pytest.mark.parametrize("fixture", ["bitflip", "shor9", "toric2"])
    def test_normalizer_sum_rule(self, fixture, request):
        code = request.getfixturevalue(fixture)
        assert normalizer_enumerator(code).total == 2 ** (code.n + code.k)


class TestClassProbabilities:

    @pytest.mark.parametrize("channel", [independent_xz(3, F(1, 8)), depolarizing(3, F(1, 5))])
    def test_joint_probabilities_sum_to_one(self, bitflip, channel):
        total = sum(
            sum(class_probabilities(bitflip, channel, s).values())
            for s in all_syndromes(bitflip)
        )
        assert total == 1

    def test_noiseless_channel(self, toric2):
        probs = class_probabilities(toric2, independent_xz(8, F(0)), Syndrome.zero(6))
        assert probs[LogicalLabel.trivial(2)] == 1
        assert sum(probs.values()) == 1

    def test_enumerator_polynomial_identity(self, bitflip, toric2):
        rng = np.random.default_rng(2024)
        codes = [bitflip, toric2]
        for _ in range(6):
            n = int(rng.integers(2, 9))
            codes.append(random_code(rng, n, int(rng.integers(1, n))))
        for _ in range(200):
            code = codes[int(rng.integers(0, len(codes)))]
            s = Syndrome.from_int(int(rng.integers(0, 2**code.r)), code.r)
            labels = all_labels(code.k)
            label = labels[int(rng.integers(0, len(labels)))]
            p = F(int(rng.integers(1, 64)), 64)
            direct = class_probability(code, independent_xz(code.n, p), s, label)
            assert direct == evaluate_enumerator(coset_enumerator(code, s, label), p)

    def test_channel_size_checked(self, bitflip):
        with pytest.raises(LengthMismatch):
            class_probabilities(bitflip, independent_xz(4, F(1, 8)), Syndrome.zero(2))


class TestDqmld:

    def test_zero_syndrome_small_p(self, shor9):
        assert dqmld(shor9, independent_xz(9, F(1, 64)), Syndrome.zero(8)).winner.is_trivial()

    def test_bitflip_single_flip(self, bitflip):
        result = dqmld(bitflip, independent_xz(3, F(1, 8)), Syndrome.from_string("10"))
        assert result.winner == TRIVIAL
        assert 0 < result.achieved_gap < 1
        assert list(result.class_probs) == all_labels(1)

    def test_no_logical_qubits(self):
        code = canonical_completion(ops("XX", "ZZ"))
        result = dqmld(code, depolarizing(2, F(1, 10)), Syndrome.zero(2))
        assert result.achieved_gap == 1

    def test_impossible_syndrome(self, bitflip):
        ch = compose([z_only(F(1, 3))] * 3)
        result = dqmld(bitflip, ch, Syndrome.from_string("10"))
        assert result.achieved_gap == 0
        assert result.winner == TRIVIAL

    def test_to_json(self, bitflip):
        payload = dqmld(bitflip, independent_xz(3, F(1, 8)), Syndrome.zero(2)).to_json()
        assert payload["winner"] == "I"
        assert set(payload["class_probs"]) == {"I", "Z", "X", "Y"}


class TestQmld:

    def test_bitflip_single_flip(self, bitflip):
        assert str(qmld(bitflip, independent_xz(3, F(1, 8)), Syndrome.from_string("10"))) == "XII"

    def test_zero_syndrome(self, shor9):
        assert qmld(shor9, independent_xz(9, F(1, 16)), Syndrome.zero(8)).is_identity()

    @pytest.mark.parametrize("channel", [independent_xz(3, F(1, 4)), depolarizing(3, F(1, 5))])
    def test_matches_exhaustive_search(self, bitflip, channel):
        for s in all_syndromes(bitflip):
            candidates = [eta for eta in range(2**6) if syndrome_int(bitflip, eta) == s.bits.value]
            best = max(channel.probability_eta(eta) for eta in candidates)
            ties = sorted(
                eta_key(from_eta_int(eta, 3))
                for eta in candidates
                if channel.probability_eta(eta) == best
            )
            assert eta_key(qmld(bitflip, channel, s)) == ties[0]

    def test_limit(self, shor9, monkeypatch):
        monkeypatch.setenv("STABKIT_MAX_ENUM", "9")
        with pytest.raises(TooLarge):
            qmld(shor9, independent_xz(9, F(1, 16)), Syndrome.zero(8))

    def test_limit_applies_after_caching(self, shor9, monkeypatch):
        channel = independent_xz(9, F(1, 16))
        assert class_probability(shor9, channel, Syndrome.zero(8), TRIVIAL) > 0
        monkeypatch.setenv("STABKIT_MAX_ENUM", "4")
        with pytest.raises(TooLarge):
            class_probability(shor9, channel, Syndrome.zero(8), TRIVIAL)
        with pytest.raises(TooLarge):
            coset_enumerator(shor9, Syndrome.zero(8), TRIVIAL)


class TestLargeGapEquivalence:

    def test_bitflip_every_syndrome(self, bitflip):
        for s in all_syndromes(bitflip):
            assert large_gap_equivalence_check(bitflip, independent_xz(3, F(1, 16)), s).ok

    def test_shor_zero_syndrome(self, shor9):
        report = large_gap_equivalence_check(shor9, independent_xz(9, F(1, 32)), Syndrome.zero(8))
        assert report.ok
        assert report.qmld_class == report.dqmld_class == "I"

    def test_noiseless(self, bitflip):
        assert large_gap_equivalence_check(bitflip, independent_xz(3, F(0)), Syndrome.from_string("01")).ok

    @pytest.mark.slow
    @pytest.mark.parametrize("fixture", ["bitflip", "toric2", "shor9"])
    @pytest.mark.parametrize("p", [F(1, 32), F(1, 16)])
    def test_all_fixtures(self, fixture, p, request):
        code = request.getfixturevalue(fixture)
        ch = independent_xz(code.n, p)
        for s in all_syndromes(code):
            assert large_gap_equivalence_check(code, ch, s).ok


def test_p_tilde_round_trip():
    assert p_tilde(F(1, 8)) == F(1, 15)
    assert p_from_p_tilde(F(1, 15)) == F(1, 8)


class TestTwoClassFamily:

    M, A, B, C = 2, 1, 12, 3

    @pytest.fixture
    def enumerators(self):
        return two_class_enumerators(self.M, self.A, self.B, self.C)

    def test_shape(self, enumerators):
        assert set(enumerators) == {TRIVIAL, Z_LABEL}
        assert enumerators[TRIVIAL].total == enumerators[Z_LABEL].total == 2**self.M
        assert len(enumerators[TRIVIAL].counts) % 2 == 1

    def test_threshold(self):
        assert degeneracy_threshold(self.M, self.A, self.C) == F(1, 2)

    @pytest.mark.parametrize(
        "pt, disagree",
        [
            (F(1, 4), False),
            (F(3, 8), False),
            (F(7, 16), False),
            (F(1, 2), False),
            (F(9, 16), True),
            (F(5, 8), True),
            (F(3, 4), True),
        ],
    )
    def test_disagreement_iff_above_threshold(self, enumerators, pt, disagree):
        p = p_from_p_tilde(pt)
        assert qmld_class_from_enumerators(enumerators) == TRIVIAL
        assert (dqmld_from_enumerators(enumerators, p) != TRIVIAL) is disagree
        assert disagree is (pt > degeneracy_threshold(self.M, self.A, self.C))

    @pytest.mark.parametrize("args", [(0, 1, 12, 3), (2, 3, 12, 3), (2, 1, 2, 3)])
    def test_bad_parameters(self, args):
        with pytest.raises(OutOfRange):
            two_class_enumerators(*args)

    def test_irrational_threshold(self):
        with pytest.raises(OutOfRange):
            degeneracy_threshold(1, 0, 2)


def test_compare_decoders_small_p(bitflip):
    df = compare_decoders(bitflip, [F(1, 64), F(1, 32)])
    assert len(df) == 8
    assert list(df.columns) == ["p", "syndrome", "qmld_class", "dqmld_class", "achieved_gap", "agree"]
    assert df["agree"].all()


def test_compare_decoders_selected_syndromes(toric2):
    syndromes = [Syndrome.zero(6), Syndrome.from_int(0b000011, 6)]
    df = compare_decoders(toric2, [F(1, 16)], syndromes)
    assert list(df["syndrome"]) == ["000000", "110000"]
    assert df.loc[0, "dqmld_class"] == "II"
