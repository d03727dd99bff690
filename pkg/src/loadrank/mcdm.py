"""Stochastic multi-criteria ranking by pairwise outranking.

Alternatives carry one discrete score distribution per criterion. Ranking is
a three-step procedure over every ordered pair (n, m):

1. pairwise comparison: the probability that n outscores m on each criterion,
   counting exact ties at half weight;
2. classification: enumerate all 2^A joint win/lose realizations across the
   criteria, weight each by the product of its per-criterion probabilities,
   and classify it as most-preferable / indifferent / not-preferable by
   comparing the weighted win vector against a threshold;
3. ranking: superiority r(n, m) is the most-preferable mass plus half the
   indifferent mass, fitness f(n) the mean superiority over all opponents,
   and the final order sorts fitness descending.

The fitness value is an upper bound on the probability of an alternative
being the single best one, which is what makes it an honest (if optimistic)
ranking key. A brute-force oracle recomputes everything by exhaustive
enumeration of the joint score-outcome tables for verification.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .domain import CriteriaConfig, validate_criteria
from .scoring import SCORE_GRID, ScoreDistribution

COMPLEMENT_TOL = 1e-9
MAX_CRITERIA = 32
BRUTE_FORCE_LIMIT = 1_000_000


class RankingError(ValueError):
    pass


@dataclass(frozen=True)
class PairwiseComparison:
    """Per-criterion probabilities that alternative ``n`` outscores ``m``."""

    n: int
    m: int
    win_prob: tuple[float, ...]


@dataclass(frozen=True)
class OutcomeClassification:
    n: int
    m: int
    p_most_preferable: float
    p_indifferent: float
    p_not_preferable: float

    def superiority(self) -> float:
        return self.p_most_preferable + 0.5 * self.p_indifferent


@dataclass(frozen=True)
class AlternativeRationale:
    """Per-criterion summary backing one alternative's rank, for display."""

    expected_scores: tuple[float, ...]
    mean_win_prob: tuple[float, ...]
    support: tuple[tuple[tuple[float, float], ...], ...]


@dataclass(frozen=True)
class RankingResult:
    order: tuple[int, ...]
    fitness: tuple[float, ...]
    superiority: np.ndarray  # r[n, m]; diagonal fixed at 0.5 by convention
    rationale: tuple[AlternativeRationale, ...]


def _grid_ints(dist: ScoreDistribution) -> np.ndarray:
    # integer grid indices make tie detection exact
    return np.array([round(v / SCORE_GRID) for v in dist.values()], dtype=np.int64)


def win_probability(d_n: ScoreDistribution, d_m: ScoreDistribution) -> float:
    """P(X_n > X_m) + 0.5 P(X_n = X_m) for independent discrete scores.

    Equality is detected on the scoring grid, so scores that agree to the
    grid resolution hit the half-weight tie branch.
    """
    vn, vm = _grid_ints(d_n), _grid_ints(d_m)
    pn, pm = np.array(d_n.probs()), np.array(d_m.probs())
    gt = vn[:, None] > vm[None, :]
    eq = vn[:, None] == vm[None, :]
    return float(pn @ (gt + 0.5 * eq) @ pm)


def classify_outcomes(comp: PairwiseComparison, config: CriteriaConfig) -> OutcomeClassification:
    """Classify the 2^A joint realizations of the pairwise indicator vector.

    Each realization's probability is the independence product of its
    per-criterion win/lose probabilities; a realization is most-preferable
    when its weighted indicator sum exceeds the threshold, not-preferable when
    it falls below one minus the threshold, indifferent otherwise.
    """
    validate_criteria(config)
    a = len(config.criteria)
    if a != len(comp.win_prob):
        raise RankingError(f"{len(comp.win_prob)} win probabilities for {a} criteria")
    if a > MAX_CRITERIA:
        raise RankingError(f"{a} criteria exceeds the {MAX_CRITERIA}-criteria enumeration guard")
    w = np.array(config.weights)
    nu = config.threshold
    masses = [0.0, 0.0, 0.0]  # S1, S2, S3
    for g in itertools.product((1, 0), repeat=a):
        q = 1.0
        for ga, pa in zip(g, comp.win_prob):
            q *= pa if ga else (1.0 - pa)
        wg = float(w @ np.array(g))
        if wg > nu:
            masses[0] += q
        elif wg < 1.0 - nu:
            masses[2] += q
        else:
            masses[1] += q
    return OutcomeClassification(
        n=comp.n, m=comp.m,
        p_most_preferable=masses[0],
        p_indifferent=masses[1],
        p_not_preferable=masses[2],
    )


def _pad_supports(dists: list[ScoreDistribution]) -> tuple[np.ndarray, np.ndarray]:
    """Pad N supports to a common width: grid-int values and probabilities."""
    n = len(dists)
    width = max(len(d.support) for d in dists)
    values = np.full((n, width), np.iinfo(np.int64).min, dtype=np.int64)
    probs = np.zeros((n, width))
    for i, d in enumerate(dists):
        k = len(d.support)
        values[i, :k] = _grid_ints(d)
        probs[i, :k] = d.probs()
    return values, probs


def _win_matrix(values: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """All-pairs win probabilities for one criterion; entry [n, m] = P(E n>m)."""
    gt = values[:, None, :, None] > values[None, :, None, :]
    eq = values[:, None, :, None] == values[None, :, None, :]
    return np.einsum("ni,mj,nmij->nm", probs, probs, gt + 0.5 * eq, optimize=True)


def rank(
    scores: list[list[ScoreDistribution]],
    config: CriteriaConfig,
) -> RankingResult:
    """Run the full three-step procedure over the alternative set.

    ``scores[n][a]`` is alternative n's distribution on criterion a. Ties in
    fitness break by input (enumeration) order. The complement identity
    r(n, m) + r(m, n) = 1 is asserted as an internal consistency check; both
    directions are computed independently rather than mirrored.
    """
    validate_criteria(config)
    n_alt = len(scores)
    if n_alt < 2:
        raise RankingError(f"need >= 2 alternatives to rank, got {n_alt}")
    a = len(config.criteria)
    if a > MAX_CRITERIA:
        raise RankingError(f"{a} criteria exceeds the {MAX_CRITERIA}-criteria enumeration guard")
    for i, row in enumerate(scores):
        if len(row) != a:
            raise RankingError(f"alternative {i} has {len(row)} distributions for {a} criteria")

    win = np.empty((a, n_alt, n_alt))
    for ai in range(a):
        values, probs = _pad_supports([row[ai] for row in scores])
        win[ai] = _win_matrix(values, probs)

    w = np.array(config.weights)
    nu = config.threshold
    s1 = np.zeros((n_alt, n_alt))
    s2 = np.zeros((n_alt, n_alt))
    for g in itertools.product((1, 0), repeat=a):
        q = np.ones((n_alt, n_alt))
        for ai, ga in enumerate(g):
            q = q * (win[ai] if ga else (1.0 - win[ai]))
        wg = float(w @ np.array(g))
        if wg > nu:
            s1 += q
        elif not wg < 1.0 - nu:
            s2 += q

    r = s1 + 0.5 * s2
    np.fill_diagonal(r, 0.5)
    asym = np.abs(r + r.T - 1.0)
    if asym.max() > COMPLEMENT_TOL:
        raise RankingError(f"complement identity violated by {asym.max():.2e}")

    fitness = (r.sum(axis=1) - 0.5) / (n_alt - 1)
    order = tuple(sorted(range(n_alt), key=lambda i: (-fitness[i], i)))

    rationale = tuple(
        AlternativeRationale(
            expected_scores=tuple(scores[i][ai].mean() for ai in range(a)),
            mean_win_prob=tuple(
                float((win[ai, i].sum() - win[ai, i, i]) / (n_alt - 1)) for ai in range(a)
            ),
            support=tuple(scores[i][ai].support for ai in range(a)),
        )
        for i in range(n_alt)
    )
    return RankingResult(
        order=order,
        fitness=tuple(float(f) for f in fitness),
        superiority=r,
        rationale=rationale,
    )


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def _pair_outcome_tables(
    row_n: list[ScoreDistribution], row_m: list[ScoreDistribution]
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Joint score-outcome table for one ordered pair.

    Returns the joint probability tensor over every combination of support
    atoms across all criteria (axes ordered criterion-major as
    (i_1, j_1, i_2, j_2, ...)) and, per criterion, the win-indicator
    probability (1 / 0.5 / 0 for greater / tied / smaller) broadcast over the
    same axes.
    """
    a = len(row_n)
    shapes = []
    mass = np.array(1.0)
    tie_tables = []
    for ai in range(a):
        vn, vm = _grid_ints(row_n[ai]), _grid_ints(row_m[ai])
        pn, pm = np.array(row_n[ai].probs()), np.array(row_m[ai].probs())
        joint = np.multiply.outer(pn, pm)
        t1 = (vn[:, None] > vm[None, :]) + 0.5 * (vn[:, None] == vm[None, :])
        mass = np.multiply.outer(mass, joint)
        shapes.append(joint.shape)
        tie_tables.append(t1)
    if mass.size > BRUTE_FORCE_LIMIT:
        raise RankingError(f"joint outcome table of {mass.size} entries exceeds brute-force limit")
    # broadcast each criterion's indicator table over the full joint axes
    full = []
    for ai in range(a):
        shape = [1] * (2 * a)
        shape[2 * ai], shape[2 * ai + 1] = shapes[ai]
        full.append(tie_tables[ai].reshape(shape))
    return mass, full


def _pair_superiority_table(
    row_n: list[ScoreDistribution],
    row_m: list[ScoreDistribution],
    config: CriteriaConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Conditional superiority of n over m for every joint score realization.

    For each realization the per-criterion indicator is deterministic except
    on ties, where it is a fair coin; enumerating the 2^A indicator vectors
    with those coin weights and classifying each against the threshold gives
    the realization's conditional superiority value.
    """
    a = len(config.criteria)
    w = np.array(config.weights)
    nu = config.threshold
    mass, indicator = _pair_outcome_tables(row_n, row_m)
    value = np.zeros_like(mass)
    for g in itertools.product((1, 0), repeat=a):
        q = np.ones_like(mass)
        for ai, ga in enumerate(g):
            q = q * (indicator[ai] if ga else (1.0 - indicator[ai]))
        wg = float(w @ np.array(g))
        if wg > nu:
            value = value + q
        elif not wg < 1.0 - nu:
            value = value + 0.5 * q
    return mass, value


def brute_force_rank(
    scores: list[list[ScoreDistribution]],
    config: CriteriaConfig,
) -> RankingResult:
    """Exhaustive-enumeration reference implementation of :func:`rank`.

    Walks the explicit joint outcome space of both alternatives' scores for
    every ordered pair instead of multiplying marginal win probabilities, so
    agreement with :func:`rank` cross-checks the independence bookkeeping.
    Only viable on small instances.
    """
    validate_criteria(config)
    n_alt = len(scores)
    if n_alt < 2:
        raise RankingError(f"need >= 2 alternatives to rank, got {n_alt}")
    r = np.full((n_alt, n_alt), 0.5)
    for n in range(n_alt):
        for m in range(n_alt):
            if n == m:
                continue
            mass, value = _pair_superiority_table(scores[n], scores[m], config)
            r[n, m] = float((mass * value).sum())
    fitness = (r.sum(axis=1) - 0.5) / (n_alt - 1)
    order = tuple(sorted(range(n_alt), key=lambda i: (-fitness[i], i)))
    a = len(config.criteria)
    rationale = tuple(
        AlternativeRationale(
            expected_scores=tuple(scores[i][ai].mean() for ai in range(a)),
            mean_win_prob=(),
            support=tuple(scores[i][ai].support for ai in range(a)),
        )
        for i in range(n_alt)
    )
    return RankingResult(
        order=order,
        fitness=tuple(float(f) for f in fitness),
        superiority=r,
        rationale=rationale,
    )


def simultaneous_win_probability(
    scores: list[list[ScoreDistribution]],
    config: CriteriaConfig,
    n: int,
) -> float:
    """Probability that alternative ``n`` beats every other alternative at once.

    All alternatives' scores are sampled jointly (independent across
    alternatives and criteria); conditional on n's realized scores the
    per-opponent superiority events are independent, so the simultaneous
    probability is the expectation over n's realizations of the product of
    conditional per-opponent superiorities. The fitness value from the
    ranking is an upper bound on this quantity.
    """
    n_alt = len(scores)
    a = len(config.criteria)
    # joint realizations of n across criteria: index tuples and probabilities
    supports = [scores[n][ai] for ai in range(a)]
    combos = list(itertools.product(*[range(len(d.support)) for d in supports]))
    q_n = np.array(
        [math.prod(supports[ai].probs()[idx[ai]] for ai in range(a)) for idx in combos]
    )
    total = np.ones(len(combos))
    for m in range(n_alt):
        if m == n:
            continue
        mass, value = _pair_superiority_table(scores[n], scores[m], config)
        a_axes = tuple(2 * ai + 1 for ai in range(a))  # m's axes
        cond = (mass * value).sum(axis=a_axes) / mass.sum(axis=a_axes)
        total *= np.array([cond[tuple(idx)] for idx in combos])
    return float(q_n @ total)
