"""Strategy pipelines checked against hand-derived exact probabilities.

The recurring 5-qubit instance: global conjunction with upper half marking
10 and lower half marking 101, candidates {011, 101}. Useful exact values:
a 2-round single-mark search over 8 states puts 121/128 on the mark, and a
1-round search with a quarter marked is exact.
"""

import pytest

from qtreesearch.errors import ConfigurationError, PreconditionError, ValidationError
from qtreesearch.grover import QueryCounter
from qtreesearch.oracles import ConcatenatedOracle, ConjunctionOracle, PartialCandidateSet
from qtreesearch.statevector import partition_purity, probability_map, qubits, sample
from qtreesearch.strategies import (
    DECISION_THRESHOLD,
    SearchProblem,
    SearchResult,
    block_distribution,
    disentangled_layout,
    disentangled_search,
    entangled_nested,
    flag_excitation,
    iterative_search,
    iterative_trial_state,
    product_subspace_search,
    prepare_candidates,
    recover_candidate,
)

TWO_ROUND_EIGHT = 121 / 128  # sin^2(5 asin(sqrt(1/8))) exactly


def five_qubit_problem(candidate_strings=("011", "101")):
    upper = ConjunctionOracle.from_signed_literals([2, -1], width=2)
    lower = ConjunctionOracle.from_signed_literals([3, -2, 1], width=3)
    return SearchProblem(
        global_oracle=ConcatenatedOracle(upper, lower),
        candidates=PartialCandidateSet.from_strings(list(candidate_strings)),
    )


def six_qubit_problem(candidate_strings=("011", "101")):
    upper = ConjunctionOracle.from_signed_literals([-3, -2, 1], width=3)
    lower = ConjunctionOracle.from_signed_literals([-3, 2, 1], width=3)
    return SearchProblem(
        global_oracle=ConcatenatedOracle(upper, lower),
        candidates=PartialCandidateSet.from_strings(list(candidate_strings)),
    )


class TestSearchProblem:
    def test_geometry(self):
        problem = five_qubit_problem()
        assert (problem.m, problem.g, problem.v) == (5, 3, 2)
        assert problem.solution_bits == "10101"
        assert problem.upper_target_bits == "10"
        assert problem.lower_solution_bits == "101"
        assert problem.matching_candidate_index() == 2

    def test_rejects_candidate_width_mismatch(self):
        upper = ConjunctionOracle.from_signed_literals([2, -1], width=2)
        lower = ConjunctionOracle.from_signed_literals([3, -2, 1], width=3)
        with pytest.raises(ConfigurationError):
            SearchProblem(
                global_oracle=ConcatenatedOracle(upper, lower),
                candidates=PartialCandidateSet.from_strings(["01", "10"]),
            )

    def test_result_consistency_guard(self):
        with pytest.raises(ValidationError):
            SearchResult(
                found=None, candidate_index=1, verified=True, queries=QueryCounter(), trials=1
            )


class TestPrepareCandidates:
    def test_quarter_marked_prep_is_exact(self):
        problem = five_qubit_problem()
        sv = prepare_candidates(problem)
        probs = probability_map(sv)
        # all candidate mass, spread uniformly over upper values
        for upper in range(4):
            for cand in ("011", "101"):
                label = format(upper, "02b") + cand
                assert probs[label] == pytest.approx(1 / 8)


class TestProductSubspace:
    def test_both_completions_at_half(self):
        problem = five_qubit_problem()
        counter = QueryCounter()
        sv = product_subspace_search(problem, counter)
        probs = probability_map(sv)
        assert probs["10011"] == pytest.approx(0.5, abs=1e-12)
        assert probs["10101"] == pytest.approx(0.5, abs=1e-12)
        assert counter.oracle_calls == 2

    def test_halves_stay_product(self):
        sv = product_subspace_search(five_qubit_problem())
        assert partition_purity(sv, qubits(0, 1, 2)) == pytest.approx(1.0, abs=1e-9)

    def test_single_candidate_concentrates(self):
        problem = five_qubit_problem(candidate_strings=("101",))
        sv = product_subspace_search(problem)
        assert probability_map(sv)["10101"] == pytest.approx(TWO_ROUND_EIGHT)


class TestEntangledNested:
    def test_solution_at_half(self):
        problem = five_qubit_problem()
        counter = QueryCounter()
        sv = entangled_nested(problem, counter)
        probs = probability_map(sv)
        assert probs["10101"] == pytest.approx(0.5, abs=1e-12)
        # the non-matching candidate keeps its uniform upper spread
        for upper in ("00", "01", "10", "11"):
            assert probs[upper + "011"] == pytest.approx(0.125, abs=1e-12)
        assert counter.oracle_calls == 2

    def test_halves_end_entangled(self):
        # rho_L has two half-weight candidates plus a 1/4 cross term from
        # the overlap of |10> with the uniform upper block: purity 5/8
        sv = entangled_nested(five_qubit_problem())
        purity = partition_purity(sv, qubits(0, 1, 2))
        assert purity == pytest.approx(0.625, abs=1e-9)
        assert purity < 0.999

    def test_mass_scales_inversely_with_candidates(self):
        # v=2 at split 3: the matching block also pays the 8-state search loss
        sv2 = entangled_nested(six_qubit_problem())
        assert probability_map(sv2)["001011"] == pytest.approx(TWO_ROUND_EIGHT / 2)
        # v=4 at split 4: both stages sit on exact rotations
        upper = ConjunctionOracle.from_signed_literals([2, -1], width=2)
        lower = ConjunctionOracle.from_signed_literals([4, -3, 2, 1], width=4)
        problem = SearchProblem(
            global_oracle=ConcatenatedOracle(upper, lower),
            candidates=PartialCandidateSet.from_strings(["0011", "0101", "1011", "1110"]),
        )
        sv4 = entangled_nested(problem)
        assert probability_map(sv4)["101011"] == pytest.approx(0.25, abs=1e-12)

    def test_requires_a_matching_candidate(self):
        with pytest.raises(PreconditionError):
            entangled_nested(five_qubit_problem(candidate_strings=("011", "110")))

    def test_single_matching_candidate_has_no_splitting_loss(self):
        problem = five_qubit_problem(candidate_strings=("101",))
        sv = entangled_nested(problem)
        assert probability_map(sv)["10101"] == pytest.approx(TWO_ROUND_EIGHT)


class TestIterativeSearch:
    def test_matching_candidate_first(self):
        problem = five_qubit_problem(candidate_strings=("101", "011"))
        result = iterative_search(problem, seed=7)
        assert result.verified
        assert result.found == "10101"
        assert result.candidate_index == 1
        assert result.trials == 1
        assert result.queries.oracle_calls == 4  # 2 lower + 1 upper + 1 check

    def test_mismatch_first_then_success(self):
        problem = five_qubit_problem()
        result = iterative_search(problem, seed=7)
        assert result.verified
        assert result.found == "10101"
        assert result.candidate_index == 2
        assert result.trials == 2
        assert result.queries.oracle_calls == 8

    def test_mismatch_trial_spreads_over_the_upper_half(self):
        problem = five_qubit_problem()
        probs = probability_map(iterative_trial_state(problem, 1))
        for upper in ("00", "01", "10", "11"):
            assert probs[upper + "011"] == pytest.approx(121 / 512, abs=1e-12)
        assert probs["10101"] == pytest.approx(1 / 128, abs=1e-12)

    def test_matching_trial_concentrates(self):
        problem = five_qubit_problem()
        probs = probability_map(iterative_trial_state(problem, 2))
        assert probs["10101"] == pytest.approx(TWO_ROUND_EIGHT)

    def test_matching_trial_histogram_dominated_by_the_solution(self):
        problem = five_qubit_problem()
        sv = iterative_trial_state(problem, 2)
        histogram = sample(sv, shots=256, seed=11)
        assert histogram["10101"] / 256 >= 0.9

    def test_exhaustion_returns_unverified(self):
        problem = five_qubit_problem(candidate_strings=("011", "110"))
        result = iterative_search(problem, seed=3)
        assert not result.verified
        assert result.found is None
        assert result.trials == 2

    def test_query_bound_over_all_lower_placements(self):
        # criterion: every placement of the lower string verifies within
        # the v * (r_lower + r_upper + 1) budget
        upper = ConjunctionOracle.from_signed_literals([2, -1], width=2)
        for lower_value in range(8):
            lower_bits = format(lower_value, "03b")
            lower = ConjunctionOracle.matching(lower_bits)
            decoy = format(lower_value ^ 0b111, "03b")
            problem = SearchProblem(
                global_oracle=ConcatenatedOracle(upper, lower),
                candidates=PartialCandidateSet.from_strings([decoy, lower_bits]),
            )
            result = iterative_search(problem, seed=13)
            assert result.verified
            assert result.found == "10" + lower_bits
            assert result.queries.oracle_calls <= 2 * (2 + 1 + 1)


class TestDisentangledSearch:
    def test_layout_positions(self):
        layout = disentangled_layout(six_qubit_problem())
        assert layout.total_qubits == 11
        assert layout.lower.indices == (0, 1, 2)
        assert layout.flag(1) == 3
        assert layout.block(1).indices == (4, 5, 6)
        assert layout.flag(2) == 7
        assert layout.block(2).indices == (8, 9, 10)

    def test_matching_block_wins(self):
        problem = six_qubit_problem()
        counter = QueryCounter()
        winning, state = disentangled_search(problem, counter)
        assert winning == 1
        dist1 = block_distribution(problem, state, 1)
        dist2 = block_distribution(problem, state, 2)
        assert dist1["001"] == pytest.approx(TWO_ROUND_EIGHT)
        for pattern, p in dist2.items():
            assert p == pytest.approx(0.125, abs=1e-12)
        # prep (1) + two rounds in each of two blocks (4)
        assert counter.oracle_calls == 5

    def test_flags_uncompute_exactly(self):
        problem = six_qubit_problem()
        _, state = disentangled_search(problem)
        assert flag_excitation(problem, state, 1) == pytest.approx(0.0, abs=1e-12)
        assert flag_excitation(problem, state, 2) == pytest.approx(0.0, abs=1e-12)

    def test_candidate_register_stays_product(self):
        problem = six_qubit_problem()
        _, state = disentangled_search(problem)
        layout = disentangled_layout(problem)
        assert partition_purity(state, layout.lower) == pytest.approx(1.0, abs=1e-9)
        assert partition_purity(state, layout.block(1)) == pytest.approx(1.0, abs=1e-9)

    def test_null_case_spreads_every_block(self):
        problem = six_qubit_problem(candidate_strings=("101", "110"))
        winning, state = disentangled_search(problem)
        assert winning is None
        for k in (1, 2):
            for p in block_distribution(problem, state, k).values():
                assert p == pytest.approx(0.125, abs=1e-12)

    def test_threshold_separates_cleanly(self):
        problem = six_qubit_problem()
        _, state = disentangled_search(problem)
        dist1 = block_distribution(problem, state, 1)
        dist2 = block_distribution(problem, state, 2)
        assert dist1["001"] > DECISION_THRESHOLD
        assert max(dist2.values()) < DECISION_THRESHOLD

    def test_requires_two_candidates(self):
        with pytest.raises(PreconditionError):
            disentangled_search(six_qubit_problem(candidate_strings=("011",)))

    def test_rejects_oversized_composite(self):
        upper = ConjunctionOracle.from_signed_literals([5, -4, 3, -2, 1], width=5)
        lower = ConjunctionOracle.from_signed_literals([3, -2, 1], width=3)
        problem = SearchProblem(
            global_oracle=ConcatenatedOracle(upper, lower),
            candidates=PartialCandidateSet.from_strings(["011", "101", "110"]),
        )
        with pytest.raises(ConfigurationError):
            disentangled_search(problem)

    def test_recover_candidate_completes_the_solution(self):
        problem = six_qubit_problem()
        result = recover_candidate(problem, 1, seed=5)
        assert result.verified
        assert result.found == "001011"
        assert result.candidate_index == 1
        assert result.queries.oracle_calls == 3

    def test_recover_wrong_candidate_fails_verification(self):
        problem = six_qubit_problem()
        result = recover_candidate(problem, 2, seed=5)
        assert not result.verified
        assert result.found is None
