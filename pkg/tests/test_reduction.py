import dataclasses
from fractions import Fraction as F

import pytest

from stabkit import config
from stabkit.decoder import p_tilde
from stabkit.errors import (
    LengthMismatch,
    NoCrossing,
    OutOfRange,
    PostCheckFailed,
    RankDeficient,
    RoundingAmbiguous,
    SingularSystem,
    TooLarge,
)
from stabkit.gf2_linalg import BitVector
from stabkit.loader import load_classical_code
from stabkit.reduction import (
    ClassicalCode,
    CrossingPoint,
    DecoderOracle,
    affine_weight_enumerator,
    assemble_constraints,
    brute_force_we,
    build_instance,
    build_instances,
    complement_vectors,
    coset_row,
    crossing_ratio_bound_check,
    crossing_uniqueness_check,
    ensure_independence,
    find_crossing,
    geometric_schedule,
    instance_enumerators,
    monotonicity_check,
    oracle_query,
    q_from_v,
    refine_crossing,
    rounding_gap_budget,
    rounding_robustness_check,
    run_reduction,
    solve_weight_enumerators,
    trivial_class_probability_identity,
)
from stabkit.stabilizer import validate


@pytest.fixture
def rand42():
    return load_classical_code(config.CODES_DIR / "rand42.txt")


@pytest.fixture
def hamming74():
    return load_classical_code(config.CODES_DIR / "hamming74.txt")


@pytest.fixture
def rep3_instance(rep3):
    return build_instance(rep3)


class TestClassicalCode:

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            ClassicalCode.from_text("110\n110")

    def test_padding(self, id2):
        padded = id2.padded()
        assert (padded.n, padded.k) == (3, 2)
        assert brute_force_we(padded) == (1, 2, 1, 0)

    @pytest.mark.parametrize(
        "fixture, expected",
        [
            ("rep3", (1, 0, 0, 1)),
            ("id2", (1, 2, 1)),
            ("pair3", (1, 0, 3, 0)),
            ("rand42", (1, 0, 1, 2, 0)),
            ("hamming74", (1, 0, 0, 7, 7, 0, 0, 1)),
        ],
    )
    def test_brute_force_we(self, fixture, expected, request):
        assert brute_force_we(request.getfixturevalue(fixture)) == expected

    def test_full_space_is_binomial(self):
        code = ClassicalCode.from_text("1000\n0100\n0010\n0001")
        assert brute_force_we(code) == (1, 4, 6, 4, 1)

    def test_affine_coset(self, rep3):
        assert affine_weight_enumerator(rep3, BitVector.from_string("001")) == (0, 1, 1, 0)

    def test_classical_limit(self, id2, monkeypatch):
        monkeypatch.setattr(config, "MAX_CLASSICAL_DIMENSION", 1)
        with pytest.raises(TooLarge):
            brute_force_we(id2)


class TestInstance:

    def test_repetition_code(self, rep3_instance):
        inst = rep3_instance
        assert (inst.code.n, inst.code.r, inst.code.k) == (6, 5, 1)
        assert validate(inst.code).ok
        assert not inst.padded
        assert inst.g_n.to_string() == "001"
        assert inst.d_coset == 1
        assert instance_enumerators(inst) == ((1, 0, 0, 1), (0, 1, 1, 0))

    def test_full_space_is_padded(self, id2):
        inst = build_instance(id2)
        assert inst.padded
        assert inst.n == 3
        assert inst.code.n == 5
        assert validate(inst.code).ok

    def test_pair_code(self, pair3):
        inst = build_instance(pair3)
        assert validate(inst.code).ok
        assert instance_enumerators(inst) == ((1, 0, 3, 0), (0, 3, 0, 1))

    def test_derived_constants(self, rep3_instance):
        inst = rep3_instance
        assert inst.v_bound == F(1, 5)
        assert inst.v_max == F(1, 10)
        assert inst.bisection_steps == 10
        assert inst.crossing_width == F(1, 729)
        assert inst.max_crossings == 49
        assert inst.query_budget == 49 * 14

    def test_complement_vectors(self, rep3):
        vectors = complement_vectors(rep3)
        assert len(vectors) == 3
        assert vectors[0].to_string() == "001"
        words = {0b000, 0b111}
        cosets = {frozenset(v.value ^ w for w in words) for v in vectors}
        assert len(cosets) == 3
        assert all(v.value not in words for v in vectors)

    def test_complement_of_padded_code(self, id2):
        assert [v.to_string() for v in complement_vectors(id2)] == ["001"]

    def test_coset_limit(self, rep3, monkeypatch):
        monkeypatch.setattr(config, "MAX_COSET_BITS", 1)
        with pytest.raises(TooLarge):
            complement_vectors(rep3)

    def test_one_instance_per_coset(self, rep3):
        instances = build_instances(rep3)
        assert len(instances) == 3
        assert instances[0].g_n.to_string() == "001"
        assert all(validate(inst.code).ok for inst in instances)

        enumerators = [instance_enumerators(inst) for inst in instances]
        assert all(we == (1, 0, 0, 1) for we, _ in enumerators)
        we = enumerators[0][0]
        total = [we[i] + sum(b[i] for _, b in enumerators) for i in range(4)]
        assert total == [1, 3, 3, 1]

    def test_chosen_coset(self, rep3):
        inst = build_instance(rep3, BitVector.from_string("011"))
        assert validate(inst.code).ok
        assert instance_enumerators(inst)[1] == (0, 1, 1, 0)

    def test_codeword_is_not_a_coset(self, rep3):
        with pytest.raises(RankDeficient):
            build_instance(rep3, BitVector.from_string("111"))

    def test_coset_vector_length(self, rep3):
        with pytest.raises(LengthMismatch):
            build_instance(rep3, BitVector.from_string("01"))


class TestClassProbabilityIdentity:

    @pytest.mark.parametrize("p, q", [(F(1, 8), F(1, 3)), (F(1, 3), F(1, 2)), (F(1, 100), F(9, 10))])
    def test_repetition_code(self, rep3_instance, p, q):
        assert trivial_class_probability_identity(rep3_instance, p, q).ok

    def test_noiseless(self, rep3_instance):
        report = trivial_class_probability_identity(rep3_instance, F(0), F(1, 3))
        assert report.decoder_trivial == F(2, 3)
        assert report.decoder_flipped == 0

    def test_no_tunable_noise(self, rep3_instance):
        assert trivial_class_probability_identity(rep3_instance, F(1, 8), F(0)).decoder_flipped == 0

    @pytest.mark.parametrize("fixture", ["id2", "pair3", "rand42"])
    def test_other_fixtures(self, fixture, request):
        inst = build_instance(request.getfixturevalue(fixture))
        assert trivial_class_probability_identity(inst, F(1, 7), F(2, 5)).ok


class TestOracle:

    def test_tiny_p_is_trivial(self, rep3_instance):
        assert oracle_query(rep3_instance, F(1, 2**20), q_from_v(rep3_instance.v_max)).is_trivial()

    def test_largest_p_flips(self, rep3_instance):
        inst = rep3_instance
        assert oracle_query(inst, F(1, inst.n), q_from_v(inst.v_max)).name == "Z"

    def test_p_outside_range(self, rep3_instance):
        with pytest.raises(OutOfRange):
            oracle_query(rep3_instance, F(1, 2), F(1, 2))

    def test_records(self, rep3_instance):
        oracle = DecoderOracle(rep3_instance)
        assert oracle.query(F(1, 1000), F(1, 10), (F(0), F(1, 3))) == "I"
        assert oracle.queries == 1
        assert oracle.records[0].answer == "I"


class TestCrossings:

    def test_bracket(self, rep3_instance):
        inst = rep3_instance
        v = inst.v_max
        crossing = find_crossing(inst, v)
        assert crossing.width <= inst.crossing_width
        assert crossing.queries == inst.bisection_steps + 2
        q = q_from_v(v)
        assert oracle_query(inst, crossing.p_lo, q).is_trivial()
        assert oracle_query(inst, crossing.p_hi, q).name == "Z"

    def test_no_crossing_for_large_v(self, rep3_instance):
        with pytest.raises(NoCrossing):
            find_crossing(rep3_instance, F(1000))

    def test_refine_narrows(self, rep3_instance):
        crossing = find_crossing(rep3_instance, F(1, 20))
        finer = refine_crossing(rep3_instance, crossing, 5)
        assert finer.width == crossing.width / 32
        assert crossing.p_lo <= finer.p_lo < finer.p_hi <= crossing.p_hi

    @pytest.mark.parametrize("fixture", ["rep3", "id2", "rand42"])
    def test_schedule_order(self, fixture, request):
        inst = build_instance(request.getfixturevalue(fixture))
        schedule = geometric_schedule(inst)
        assert len(schedule) == 2 * inst.n + 1
        assert min(a - b for a, b in zip(schedule, schedule[1:])) >= inst.v_spacing

        crossings = [find_crossing(inst, v) for v in schedule]
        assert all(a.p_mid >= b.p_mid for a, b in zip(crossings, crossings[1:]))
        assert all(c.queries <= inst.bisection_steps + 4 for c in crossings)

    @pytest.mark.parametrize("fixture", ["rep3", "pair3"])
    def test_minimum_spacing_keeps_order(self, fixture, request):
        inst = build_instance(request.getfixturevalue(fixture))
        upper = find_crossing(inst, inst.v_max)
        lower = find_crossing(inst, inst.v_max - inst.v_spacing)
        assert lower.p_lo <= upper.p_lo
        assert lower.p_mid <= upper.p_mid

        finer_upper = refine_crossing(inst, upper, inst.bisection_steps)
        finer_lower = refine_crossing(inst, lower, inst.bisection_steps)
        assert finer_lower.p_mid <= finer_upper.p_mid
        assert finer_upper.width == upper.width / 2**inst.bisection_steps


class TestLandscape:

    @pytest.mark.parametrize("fixture", ["rep3", "id2", "pair3"])
    def test_monotone(self, fixture, request):
        inst = build_instance(request.getfixturevalue(fixture))
        assert monotonicity_check(inst, points=40).ok

    def test_single_point_grid(self, rep3_instance):
        assert monotonicity_check(rep3_instance, grid=[F(1, 8)]).ok

    def test_reversed_grid_is_flagged(self, rep3_instance):
        report = monotonicity_check(rep3_instance, grid=[F(1, 8), F(1, 16)])
        assert not report.trivial_decreasing
        assert not report.flipped_increasing
        assert report.first_violation == F(1, 16)

    def test_other_coset(self, rep3):
        inst = build_instance(rep3, BitVector.from_string("011"))
        assert monotonicity_check(inst, points=40, q=F(1, 3)).ok

    @pytest.mark.parametrize("fixture", ["rep3", "id2", "pair3"])
    def test_unique_crossing(self, fixture, request):
        inst = build_instance(request.getfixturevalue(fixture))
        for v in geometric_schedule(inst)[:5]:
            assert crossing_uniqueness_check(inst, v).ok

    def test_ratio_lower_bound(self, rep3_instance):
        for p in (F(1, 64), F(1, 8), F(1, 3)):
            assert crossing_ratio_bound_check(rep3_instance, p)

    @pytest.mark.slow
    @pytest.mark.parametrize("fixture", ["rep3", "id2", "pair3", "rand42"])
    def test_dense_grid(self, fixture, request):
        inst = build_instance(request.getfixturevalue(fixture))
        assert monotonicity_check(inst, points=2_000).ok
        for v in geometric_schedule(inst)[:5]:
            assert crossing_uniqueness_check(inst, v, points=10_000).ok


def _crossing_sets(instances):
    return [ensure_independence(inst).crossings for inst in instances]


class TestConstraintSystem:

    def test_shape(self, rep3):
        instances = build_instances(rep3)
        inst = instances[0]
        system = assemble_constraints(inst, _crossing_sets(instances))
        width = 3 * (inst.n + 1)
        assert system.cosets == 3
        assert system.size == width
        assert len(system.matrix) == 3 * (2 * inst.n + 1) + 6
        assert all(len(row) == width for row in system.matrix)
        assert system.matrix[-2] == [0] * (2 * (inst.n + 1)) + [1, 0, 0, 0]
        assert system.matrix[-1] == [0] * (2 * (inst.n + 1)) + [1, 1, 1, 1]
        assert system.rhs[-2:] == [0, 2**inst.k]
        assert system.rank() == width

    def test_needs_every_coset(self, rep3_instance):
        crossings = ensure_independence(rep3_instance).crossings
        with pytest.raises(LengthMismatch):
            assemble_constraints(rep3_instance, [crossings])

    def test_true_enumerators_satisfy_rows(self, rep3):
        instances = build_instances(rep3)
        truth = [instance_enumerators(inst) for inst in instances]
        unknowns = [x for _, b in truth for x in b]
        we = truth[0][0]
        p = F(1, 8)
        pt = p_tilde(p)
        for j, (_, b) in enumerate(truth):
            v = sum(c * pt**i for i, c in enumerate(b)) / sum(c * pt**i for i, c in enumerate(we))
            row, rhs = coset_row(3, 3, j, CrossingPoint(v=v, p_lo=p, p_hi=p, queries=0))
            assert sum(a * x for a, x in zip(row, unknowns)) == rhs

    def test_duplicate_rows_are_dependent(self, rep3_instance):
        crossing = find_crossing(rep3_instance, F(1, 20))
        system = assemble_constraints(rep3_instance, [[crossing, crossing], [], []])
        assert system.rank() == 1 + 6

    def test_duplicate_v_is_resampled(self, rep3_instance):
        inst = rep3_instance
        schedule = geometric_schedule(inst)
        result = ensure_independence(inst, schedule=[schedule[0]] + schedule)
        assert len(result.crossings) == 2 * inst.n + 1
        assert len(result.resampled) >= 1
        assert len(set(result.v_schedule)) == len(result.v_schedule)
        assert result.consumed <= inst.max_crossings

    def test_bad_midpoints_are_caught(self, rep3):
        instances = build_instances(rep3)
        shifted = [
            [dataclasses.replace(c, p_mid=c.p_mid * F(3, 2)) for c in points]
            for points in _crossing_sets(instances)
        ]
        with pytest.raises((RoundingAmbiguous, PostCheckFailed, SingularSystem)):
            solve_weight_enumerators(assemble_constraints(instances[0], shifted))


class TestRunReduction:

    @pytest.mark.parametrize(
        "fixture, we, b",
        [
            ("rep3", (1, 0, 0, 1), (0, 1, 1, 0)),
            ("pair3", (1, 0, 3, 0), (0, 3, 0, 1)),
            ("id2", (1, 2, 1), (0, 1, 2, 1)),
        ],
    )
    def test_small_codes(self, fixture, we, b, request):
        code = request.getfixturevalue(fixture)
        result = run_reduction(code)
        assert result.we == we == brute_force_we(code)
        assert result.b == b

    def test_every_coset_is_recovered(self, rep3):
        result = run_reduction(rep3)
        assert result.cosets == tuple(instance_enumerators(inst)[1] for inst in result.instances)
        assert [sum(col) for col in zip(result.we, *result.cosets)] == [1, 3, 3, 1]

    def test_transcript(self, rep3):
        result = run_reduction(rep3)
        t = result.transcript
        assert t.cosets[0] == "001"
        assert len(t.cosets) == len(t.d_coset) == len(t.v_schedule) == 3
        assert t.total_queries == len(t.queries)
        assert t.total_queries <= t.query_budget
        assert len(t.crossings) == 3 * (2 * t.n + 1)
        assert {c.coset for c in t.crossings} == {0, 1, 2}
        assert t.crossings_consumed <= 3 * (2 * t.n + 1) ** 2
        assert {q.answer for q in t.queries} == {"I", "Z"}

    def test_random_full_rank_code(self, rand42):
        result = run_reduction(rand42)
        assert result.we == brute_force_we(rand42)
        assert len(result.cosets) == 3

    def test_custom_query_function(self, pair3):
        calls = []

        def counting(inst, p, q):
            calls.append(p)
            return oracle_query(inst, p, q)

        result = run_reduction(pair3, query_fn=counting)
        assert len(calls) == result.transcript.total_queries

    @pytest.mark.slow
    def test_hamming(self, hamming74):
        result = run_reduction(hamming74)
        assert result.we == (1, 0, 0, 7, 7, 0, 0, 1)
        assert all(sum(b) == 16 for b in result.cosets)


class TestRoundingRobustness:

    def test_gap_budget(self):
        assert rounding_gap_budget(3, 3) == F(2, 29)
        assert rounding_gap_budget(2, 1) == F(1, 2)

    def test_exact_v_recovers_everything(self, rep3):
        result = run_reduction(rep3)
        report = rounding_robustness_check(result.instances, result.crossings, trials=3, delta=0)
        assert report.correct == 3
        assert report.ok

    @pytest.mark.parametrize("fixture", ["rep3", "pair3"])
    def test_every_trial_is_classified(self, fixture, request):
        code = request.getfixturevalue(fixture)
        result = run_reduction(code)
        report = rounding_robustness_check(result.instances, result.crossings, trials=10, seed=11)
        n = result.instances[0].n
        assert report.delta == rounding_gap_budget(n, n)
        assert report.correct + report.detected + report.wrong == 10

    def test_large_perturbation_is_not_silent(self, rep3):
        result = run_reduction(rep3)
        report = rounding_robustness_check(result.instances, result.crossings, trials=5, seed=3, delta=F(1, 2))
        assert report.correct < 5
