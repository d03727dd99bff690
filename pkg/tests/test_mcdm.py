import numpy as np
import pytest

from loadrank.domain import CriteriaConfig
from loadrank.mcdm import (
    PairwiseComparison,
    RankingError,
    brute_force_rank,
    classify_outcomes,
    rank,
    simultaneous_win_probability,
    win_probability,
)
from loadrank.scoring import ScoreDistribution

A = ScoreDistribution.atom
CFG = CriteriaConfig()  # comfort/curtailment, (0.6, 0.4), nu=0.75


def rand_instance(rng, n_max=6, criteria=(2, 3)):
    n = int(rng.integers(2, n_max + 1))
    a = int(rng.choice(criteria))
    weights = rng.dirichlet(np.ones(a)).tolist()
    weights[-1] = 1.0 - sum(weights[:-1])
    cfg = CriteriaConfig(
        criteria=tuple(f"c{i}" for i in range(a)),
        weights=tuple(weights),
        threshold=float(rng.uniform(0.55, 0.95)),
    )
    scores = []
    for _ in range(n):
        row = []
        for _ in range(a):
            k = int(rng.integers(1, 5))
            vals = np.unique(np.round(rng.random(k), 2))
            probs = rng.dirichlet(np.ones(len(vals)))
            row.append(ScoreDistribution.from_atoms(list(zip(vals.tolist(), probs.tolist()))))
        scores.append(row)
    return scores, cfg


class TestWinProbability:
    def test_deterministic_dominance(self):
        assert win_probability(A(0.9), A(0.5)) == 1.0

    def test_equal_atoms_tie(self):
        assert win_probability(A(0.7), A(0.7)) == 0.5

    def test_straddling_mixture(self):
        # half the mass below 0.7, half above: wins with 0.5 overall
        mix = ScoreDistribution.from_atoms([(0.6, 0.5), (0.8, 0.5)])
        assert win_probability(mix, A(0.7)) == 0.5

    def test_complement(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            scores, _ = rand_instance(rng, n_max=2, criteria=(1,))
            d1, d2 = scores[0][0], scores[1][0]
            assert win_probability(d1, d2) + win_probability(d2, d1) == pytest.approx(1.0, abs=1e-12)

    def test_grid_equality_counts_as_tie(self):
        assert win_probability(A(0.50004), A(0.5)) == 0.5


class TestClassifyOutcomes:
    def test_certain_dominance(self):
        out = classify_outcomes(PairwiseComparison(0, 1, (1.0, 1.0)), CFG)
        assert (out.p_most_preferable, out.p_indifferent, out.p_not_preferable) == (1.0, 0.0, 0.0)

    def test_hand_enumerated_half_half(self):
        # realizations: (1,1) q=.25 -> S1; (1,0) q=.25 WtG=.6 -> S2;
        # (0,1) q=.25 WtG=.4 -> S2; (0,0) q=.25 -> S3
        out = classify_outcomes(PairwiseComparison(0, 1, (0.5, 0.5)), CFG)
        assert out.p_most_preferable == pytest.approx(0.25, abs=1e-12)
        assert out.p_indifferent == pytest.approx(0.5, abs=1e-12)
        assert out.p_not_preferable == pytest.approx(0.25, abs=1e-12)
        assert out.superiority() == pytest.approx(0.5, abs=1e-12)

    def test_certain_second_criterion(self):
        # (1,1) q=.5 -> S1; (0,1) q=.5 WtG=0.4 in [0.25, 0.75] -> S2
        out = classify_outcomes(PairwiseComparison(0, 1, (0.5, 1.0)), CFG)
        assert out.p_most_preferable == pytest.approx(0.5, abs=1e-12)
        assert out.p_indifferent == pytest.approx(0.5, abs=1e-12)
        assert out.p_not_preferable == 0.0

    def test_masses_sum_to_one(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            probs = tuple(rng.random(2).tolist())
            out = classify_outcomes(PairwiseComparison(0, 1, probs), CFG)
            total = out.p_most_preferable + out.p_indifferent + out.p_not_preferable
            assert total == pytest.approx(1.0, abs=1e-9)


class TestRank:
    def test_two_alternative_dominance(self):
        res = rank([[A(1.0), A(1.0)], [A(0.0), A(0.0)]], CFG)
        assert res.fitness == (1.0, 0.0)
        assert res.order == (0, 1)

    def test_identical_distributions_all_half(self):
        mix = ScoreDistribution.from_atoms([(0.3, 0.5), (0.9, 0.5)])
        res = rank([[mix, mix]] * 4, CFG)
        assert res.fitness == pytest.approx((0.5,) * 4)
        assert res.order == (0, 1, 2, 3)

    def test_three_alternative_chain(self):
        scores = [[A(1.0), A(1.0)], [A(0.5), A(0.5)], [A(0.0), A(0.0)]]
        res = rank(scores, CFG)
        assert res.fitness == pytest.approx((1.0, 0.5, 0.0))
        assert res.order == (0, 1, 2)

    def test_degenerate_input(self):
        with pytest.raises(RankingError):
            rank([[A(1.0), A(1.0)]], CFG)

    def test_complement_identity(self):
        rng = np.random.default_rng(2)
        scores, cfg = rand_instance(rng)
        r = rank(scores, cfg).superiority
        np.testing.assert_allclose(r + r.T, 1.0, atol=1e-9)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(3)
        scores, cfg = rand_instance(rng, n_max=5)
        perm = rng.permutation(len(scores))
        res = rank(scores, cfg)
        res_p = rank([scores[i] for i in perm], cfg)
        for new_pos, old_pos in enumerate(perm):
            assert res_p.fitness[new_pos] == pytest.approx(res.fitness[old_pos], abs=1e-12)

    def test_fsd_improvement_never_hurts(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            scores, cfg = rand_instance(rng, n_max=5)
            target = int(rng.integers(0, len(scores)))
            crit = int(rng.integers(0, len(cfg.criteria)))
            base = rank(scores, cfg).fitness[target]
            # shift the whole support upward: first-order stochastic dominance
            old = scores[target][crit]
            bumped = ScoreDistribution.from_atoms(
                [(min(1.0, v + 0.07), p) for v, p in old.support]
            )
            improved = [row[:] for row in scores]
            improved[target][crit] = bumped
            assert rank(improved, cfg).fitness[target] >= base - 1e-12

    def test_rationale_expected_scores(self):
        res = rank([[A(1.0), A(0.5)], [A(0.0), A(0.5)]], CFG)
        assert res.rationale[0].expected_scores == (1.0, 0.5)
        assert len(res.rationale) == 2


class TestBruteForceOracle:
    def test_matches_on_examples(self):
        for scores in (
            [[A(1.0), A(1.0)], [A(0.0), A(0.0)]],
            [[A(1.0), A(1.0)], [A(0.5), A(0.5)], [A(0.0), A(0.0)]],
        ):
            assert brute_force_rank(scores, CFG).fitness == pytest.approx(
                rank(scores, CFG).fitness, abs=1e-12
            )

    def test_random_instance_sweep(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            scores, _ = rand_instance(rng, n_max=5, criteria=(2,))
            cfg = CriteriaConfig()
            fast = rank(scores, cfg).fitness
            slow = brute_force_rank(scores, cfg).fitness
            assert max(abs(a - b) for a, b in zip(fast, slow)) < 1e-9

    def test_single_atoms_reduce_to_deterministic_outranking(self):
        scores = [[A(0.9), A(0.2)], [A(0.1), A(0.8)]]
        fast = rank(scores, CFG)
        slow = brute_force_rank(scores, CFG)
        assert fast.fitness == pytest.approx(slow.fitness, abs=1e-12)
        # one criterion each: with nu=0.75 both split realizations land in S2
        assert fast.fitness == pytest.approx((0.5, 0.5))

    def test_instance_size_guard(self):
        big = ScoreDistribution.from_atoms([(i / 200.0, 1 / 150.0) for i in range(150)])
        with pytest.raises(RankingError, match="brute-force"):
            brute_force_rank([[big, big], [big, big]], CFG)


class TestFitnessBound:
    def test_bound_on_random_instances(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            scores, cfg = rand_instance(rng)
            fitness = rank(scores, cfg).fitness
            for n in range(len(scores)):
                p_best = simultaneous_win_probability(scores, cfg, n)
                assert p_best <= fitness[n] + 1e-9

    def test_two_alternatives_bound_tight(self):
        # with exactly two alternatives the bound collapses to equality
        scores = [[A(1.0), A(1.0)], [A(0.0), A(0.0)]]
        assert simultaneous_win_probability(scores, CFG, 0) == pytest.approx(1.0)
