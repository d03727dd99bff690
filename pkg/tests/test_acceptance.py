"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
PASS lines as they complete.
"""

import json
import time

import numpy as np
import pytest

from loadrank.chiller import ChillerObservation, fit_chiller
from loadrank.controller import CurtailmentEvent, report_to_dict, run_event
from loadrank.domain import CriteriaConfig, default_building
from loadrank.mcdm import (
    PairwiseComparison,
    brute_force_rank,
    classify_outcomes,
    rank,
    simultaneous_win_probability,
)
from loadrank.occupancy import (
    OccupancyModel,
    fit_occupancy,
    simulate,
    window_occupied_frequency,
)
from loadrank.scoring import (
    CurtailmentScaleParams,
    ScoreDistribution,
    comfort_hvac,
    curtailment_score,
)


def verdict(number: int, text: str) -> None:
    print(f"\nACCEPTANCE {number}: PASS - {text}")


def random_instances(seed: int, count: int):
    """Instances with N<=6 alternatives, 2-3 criteria, supports up to 4 atoms."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 7))
        a = int(rng.choice([2, 3]))
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
                row.append(
                    ScoreDistribution.from_atoms(list(zip(vals.tolist(), probs.tolist())))
                )
            scores.append(row)
        out.append((scores, cfg))
    return out


def test_criterion_1_scoring_conformance():
    assert comfort_hvac(22, 22, 3, 10) == 1.0
    assert abs(comfort_hvac(25, 22, 3, 10) - 12.1 / 20.2) < 1e-6
    assert abs(comfort_hvac(19, 22, 3, 10) - 12.1 / 20.2) < 1e-6
    assert comfort_hvac(19, 22, 3, 10) == comfort_hvac(25, 22, 3, 10)
    params = CurtailmentScaleParams(alpha2=10.0, p_max_W=1000.0, p_min_W=10.0)
    assert abs(curtailment_score(1000.0, params) - 1.0) <= 1e-12
    assert abs(curtailment_score(10.0, params) - 0.1) <= 1e-12
    verdict(1, "comfort curve hits 1.0 / 0.59901 and curtailment endpoints are exact")


def test_criterion_2_mcdm_oracle_equivalence():
    t0 = time.time()
    instances = random_instances(seed=2024, count=100)
    worst = 0.0
    for scores, cfg in instances:
        fast = rank(scores, cfg).fitness
        slow = brute_force_rank(scores, cfg).fitness
        worst = max(worst, max(abs(a - b) for a, b in zip(fast, slow)))
    elapsed = time.time() - t0
    assert worst < 1e-9, f"fitness diverged by {worst}"
    assert elapsed < 10.0, f"sweep took {elapsed:.1f} s"
    verdict(2, f"100 instances, max fitness gap {worst:.2e} vs brute force in {elapsed:.1f} s")


def test_criterion_3_fitness_upper_bound():
    instances = random_instances(seed=2024, count=100)
    worst_slack = -1.0
    for scores, cfg in instances:
        fitness = rank(scores, cfg).fitness
        for n in range(len(scores)):
            p_best = simultaneous_win_probability(scores, cfg, n)
            assert p_best <= fitness[n] + 1e-9
            worst_slack = max(worst_slack, p_best - fitness[n])
    verdict(3, f"simultaneous-win probability never exceeds fitness (max slack {worst_slack:.2e})")


def test_criterion_4_hand_derived_classification():
    cfg = CriteriaConfig(weights=(0.6, 0.4), threshold=0.75)
    out = classify_outcomes(PairwiseComparison(0, 1, (0.5, 0.5)), cfg)
    assert out.p_most_preferable == 0.25
    assert out.p_indifferent == 0.5
    assert out.p_not_preferable == 0.25
    assert out.superiority() == 0.5
    verdict(4, "win-probs (0.5,0.5) classify to masses (0.25, 0.5, 0.25) with r = 0.5, exact")


def test_criterion_5_ranking_performance():
    rng = np.random.default_rng(7)
    scores = []
    for _ in range(120):
        row = []
        for _ in range(2):
            k = int(rng.integers(1, 5))
            vals = np.unique(np.round(rng.random(k), 2))
            probs = rng.dirichlet(np.ones(len(vals)))
            row.append(ScoreDistribution.from_atoms(list(zip(vals.tolist(), probs.tolist()))))
        scores.append(row)
    cfg = CriteriaConfig()
    rank(scores, cfg)  # warm-up
    times = []
    for _ in range(20):
        t0 = time.perf_counter()
        rank(scores, cfg)
        times.append(time.perf_counter() - t0)
    median_ms = sorted(times)[len(times) // 2] * 1000
    assert median_ms <= 100.0, f"median {median_ms:.1f} ms"
    verdict(5, f"N=120, A=2 ranked in median {median_ms:.1f} ms over 20 runs")


def test_criterion_6_chiller_regression_recovery():
    zones = ("Z1", "Z2")
    true = dict(beta0=5000.0, beta_out=200.0, beta_z=-150.0)

    def synth(n, seed, noise_sd=0.0, noise_frac=0.0):
        rng = np.random.default_rng(seed)
        t_out = rng.uniform(24, 38, n)
        sp = rng.uniform(17, 27, (n, 2))
        p = true["beta0"] + true["beta_out"] * t_out + true["beta_z"] * sp.sum(axis=1)
        if noise_sd:
            p = p + rng.normal(0, noise_sd, n)
        if noise_frac:
            p = p * (1 + rng.normal(0, noise_frac, n))
        p = np.maximum(p, 0.0)
        return [
            ChillerObservation(float(k), float(p[k]), float(t_out[k]), tuple(sp[k]))
            for k in range(n)
        ]

    exact = fit_chiller(synth(500, seed=0), zones)
    for est, truth in [
        (exact.beta0_W, true["beta0"]),
        (exact.beta_out_W_per_C, true["beta_out"]),
        *[(b, true["beta_z"]) for b in exact.beta_z_W_per_C],
    ]:
        assert abs(est - truth) / abs(truth) < 1e-6

    worst_rel = 0.0
    for seed in range(20):
        noisy = fit_chiller(synth(2000, seed=seed, noise_sd=100.0), zones)
        for est, truth in [
            (noisy.beta0_W, true["beta0"]),
            (noisy.beta_out_W_per_C, true["beta_out"]),
            *[(b, true["beta_z"]) for b in noisy.beta_z_W_per_C],
        ]:
            rel = abs(est - truth) / abs(truth)
            worst_rel = max(worst_rel, rel)
            assert rel < 0.05

    density = fit_chiller(synth(2000, seed=99, noise_frac=0.05), zones)
    assert density.fit_stats.frac_within_10pct >= 0.90
    verdict(
        6,
        f"noiseless recovery < 1e-6 rel; 20 noisy seeds worst {worst_rel * 100:.2f}%; "
        f"{density.fit_stats.frac_within_10pct * 100:.0f}% of errors within 10%",
    )


def test_criterion_7_occupancy_round_trip():
    t0 = time.time()
    matrices = np.empty((48, 2, 2))
    for w in range(48):
        p_arrive = 0.12 if 16 <= w < 36 else 0.08
        p_leave = 0.08 if 16 <= w < 36 else 0.12
        matrices[w] = [[1 - p_arrive, p_arrive], [p_leave, 1 - p_leave]]
    truth = OccupancyModel("z", 30, 5, (), matrices)

    trace = simulate(truth, seed=7, days=200)
    learned = fit_occupancy(trace, bucket_bounds_min=())
    max_err = float(np.abs(learned.matrices - truth.matrices).max())
    assert max_err < 0.05

    resim = simulate(learned, seed=123, days=200)
    mae = float(
        np.abs(window_occupied_frequency(trace) - window_occupied_frequency(resim)).mean()
    )
    assert mae <= 0.05
    elapsed = time.time() - t0
    assert elapsed < 30.0
    verdict(
        7,
        f"200-day round trip: max transition error {max_err:.3f}, "
        f"daily-pattern MAE {mae:.3f} in {elapsed:.1f} s",
    )


@pytest.fixture(scope="module")
def scenario():
    """15-zone office with fitted models, shared by the closed-loop criteria."""
    import tempfile

    from loadrank.scenario import (
        fit_models_from_snapshots,
        generate_history,
        ground_truth_occupancy,
        make_emulator,
    )

    building = default_building()
    occupants = ground_truth_occupancy(building, seed=11, days=20)
    history_emu = make_emulator(building, seed=3, occupancy_models=occupants)
    history = generate_history(history_emu, days=10)
    with tempfile.TemporaryDirectory() as td:
        models = fit_models_from_snapshots(history, building, td)
    return building, occupants, models


def _fresh_emulator(building, occupants, seed=99):
    from loadrank.scenario import make_emulator

    return make_emulator(building, seed=seed, occupancy_models=occupants)


def test_criterion_8_closed_loop_scenario(scenario):
    t0 = time.time()
    building, occupants, models = scenario
    config = CriteriaConfig(weights=(0.6, 0.4))

    # main run: every favorable action, 08:00-16:00
    event = CurtailmentEvent(start_minute=480.0, end_minute=960.0, target_reduction_W=None)
    report = run_event(
        event, _fresh_emulator(building, occupants), models.occupancy, models.chiller, config
    )
    times = np.array(report.times_min)
    reduction = np.array(report.reduction_series_W())
    in_event = (times > event.start_minute) & (times <= event.end_minute)

    # (a) curtailed never exceeds baseline beyond twice the chiller noise
    sigma = 0.02 * float(np.mean(report.baseline_chiller_W))
    min_red = float(reduction[in_event].min())
    assert min_red >= -2 * sigma

    # (b) deeper curtailment while the building is emptier
    occ_frac = np.mean([report.zone_series[z]["occupied"] for z in report.zone_series], axis=0)
    median_occ = np.median(occ_frac[in_event])
    low = in_event & (occ_frac <= median_occ)
    high = in_event & (occ_frac > median_occ)
    mean_low = float(reduction[low].mean())
    mean_high = float(reduction[high].mean())
    assert mean_low >= mean_high

    # (d) everything back at baseline one interval after the event
    assert report.restored_after_min is not None
    assert report.restored_after_min <= report.decision_interval_min + 1e-9

    # (c) comfort-only weights never sacrifice an occupied PC while an
    # unoccupied-zone alternative is still available
    comfort_only = CurtailmentEvent(
        start_minute=480.0,
        end_minute=960.0,
        target_reduction_W=3000.0,
        weights=CriteriaConfig(weights=(1.0, 0.0)),
    )
    report_c = run_event(
        comfort_only,
        _fresh_emulator(building, occupants),
        models.occupancy,
        models.chiller,
        config,
    )
    for d in report_c.decisions:
        occupied_zones = {z for z, v in d["occupied"].items() if v}
        unoccupied_left = [
            k for k in d["eligible_unselected"] if k["zone_id"] not in occupied_zones
        ]
        for s in d["selected"]:
            if (
                s["kind"] == "PlugLoad"
                and s["setting_value"] == 0.0
                and s["zone_id"] in occupied_zones
            ):
                assert not unoccupied_left, f"occupied PC shed at minute {d['minute']}"
    assert report_c.restored_after_min is not None
    assert report_c.restored_after_min <= report_c.decision_interval_min + 1e-9

    elapsed = time.time() - t0
    assert elapsed < 120.0
    verdict(
        8,
        f"curtailed <= baseline (min reduction {min_red:.0f} W vs -2sigma {-2 * sigma:.0f} W); "
        f"low-occupancy mean {mean_low:.0f} W >= high-occupancy {mean_high:.0f} W; "
        f"occupied PCs protected under comfort-only weights; restored in "
        f"{report.restored_after_min:.0f} min; {elapsed:.0f} s",
    )


def test_criterion_9_event_report_determinism(scenario):
    building, occupants, models = scenario
    config = CriteriaConfig(weights=(0.6, 0.4))
    event = CurtailmentEvent(start_minute=480.0, end_minute=600.0, target_reduction_W=2000.0)
    blobs = []
    for _ in range(2):
        report = run_event(
            event,
            _fresh_emulator(building, occupants, seed=17),
            models.occupancy,
            models.chiller,
            config,
        )
        blobs.append(json.dumps(report_to_dict(report), indent=2).encode())
    assert blobs[0] == blobs[1]
    verdict(9, f"two identical-seed runs produced byte-identical {len(blobs[0])}-byte reports")
