import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_building, plug
from loadrank.domain import ControlAlternative, ApplianceKind, ControlSetting
from loadrank.scoring import (
    CurtailmentClampWarning,
    CurtailmentScaleParams,
    ScoreDistribution,
    ScoringError,
    ZoneState,
    comfort_hvac,
    comfort_light,
    comfort_plug,
    curtailment_score,
    estimate_reduction_W,
    fleet_scale,
    score_alternative,
)


class TestComfortHvac:
    def test_at_desired_temp_is_one(self):
        assert comfort_hvac(22, 22, 3, 10) == 1.0

    def test_three_degrees_warm(self):
        # direct evaluation: (10 + 0.1 + 2) / (10 + 0.1 + 10 + 0.1)
        assert comfort_hvac(25, 22, 3, 10) == pytest.approx(12.1 / 20.2, abs=1e-12)

    def test_symmetric_cold_side(self):
        assert comfort_hvac(19, 22, 3, 10) == comfort_hvac(25, 22, 3, 10)

    def test_rejects_bad_params(self):
        with pytest.raises(ScoringError):
            comfort_hvac(22, 22, 3, 1.0)
        with pytest.raises(ScoringError):
            comfort_hvac(22, 22, -1.0, 10)
        with pytest.raises(ScoringError):
            comfort_hvac(float("nan"), 22, 3, 10)

    @settings(max_examples=100, deadline=None)
    @given(
        t64=st.integers(min_value=-30 * 64, max_value=70 * 64),
        ts64=st.integers(min_value=10 * 64, max_value=35 * 64),
        delta=st.floats(min_value=0.5, max_value=10),
        alpha=st.floats(min_value=1.01, max_value=50),
    )
    def test_exact_mirror_symmetry_on_dyadic_grid(self, t64, ts64, delta, alpha):
        # on a 1/64-degC grid the reflected temperature is exactly
        # representable, so the symmetry holds bitwise
        t, ts = t64 / 64.0, ts64 / 64.0
        assert comfort_hvac(t, ts, delta, alpha) == comfort_hvac(2 * ts - t, ts, delta, alpha)

    @settings(max_examples=100, deadline=None)
    @given(
        t=st.floats(min_value=-30, max_value=70),
        ts=st.floats(min_value=10, max_value=35),
        delta=st.floats(min_value=0.5, max_value=10),
        alpha=st.floats(min_value=1.01, max_value=50),
    )
    def test_mirror_symmetry_arbitrary_floats(self, t, ts, delta, alpha):
        a = comfort_hvac(t, ts, delta, alpha)
        b = comfort_hvac(2 * ts - t, ts, delta, alpha)
        assert a == pytest.approx(b, rel=1e-9)

    def test_strictly_decreasing_above_desired(self):
        values = [comfort_hvac(22 + 10 * i / 100, 22, 3, 10) for i in range(101)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestComfortLight:
    def test_extremes_and_quarter_power(self):
        assert comfort_light(100, 100) == 1.0
        assert comfort_light(25, 100) == 0.5
        assert comfort_light(0, 100) == 0.0

    def test_domain_errors(self):
        with pytest.raises(ScoringError):
            comfort_light(101, 100)
        with pytest.raises(ScoringError):
            comfort_light(-1, 100)


class TestComfortPlug:
    def test_off_on(self):
        assert comfort_plug(0, 60) == 1.0
        assert comfort_plug(60, 60) == 0.0

    def test_intermediate_power_rejected(self):
        with pytest.raises(ScoringError):
            comfort_plug(30, 60)


class TestCurtailmentScore:
    def setup_method(self):
        self.params = CurtailmentScaleParams(alpha2=10, p_max_W=1000, p_min_W=10)

    def test_endpoints_exact(self):
        assert curtailment_score(1000, self.params) == pytest.approx(1.0, abs=1e-12)
        assert curtailment_score(10, self.params) == pytest.approx(0.1, abs=1e-12)

    def test_midpoint_log_scale(self):
        # log(1000/100)/log(1000/10) = 1/2, so the score is 10^(-1/2)
        assert curtailment_score(100, self.params) == pytest.approx(10**-0.5, abs=1e-12)

    def test_clamp_warns(self):
        with pytest.warns(CurtailmentClampWarning):
            assert curtailment_score(5, self.params) == pytest.approx(0.1, abs=1e-12)
        with pytest.warns(CurtailmentClampWarning):
            assert curtailment_score(2000, self.params) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_fleet_scores_one(self):
        p = CurtailmentScaleParams(alpha2=10, p_max_W=50, p_min_W=50)
        assert curtailment_score(50, p) == 1.0

    @settings(max_examples=100, deadline=None)
    @given(
        alpha2=st.floats(min_value=1.1, max_value=100),
        p_min=st.floats(min_value=0.1, max_value=1e3),
        span=st.floats(min_value=1.0, max_value=1e4),
        x=st.floats(min_value=0, max_value=1),
        y=st.floats(min_value=0, max_value=1),
    )
    def test_monotone_in_reduction(self, alpha2, p_min, span, x, y):
        params = CurtailmentScaleParams(alpha2=alpha2, p_max_W=p_min + span, p_min_W=p_min)
        lo, hi = sorted([p_min + x * span, p_min + y * span])
        assert curtailment_score(lo, params) <= curtailment_score(hi, params) + 1e-12


class TestScoreDistribution:
    def test_merges_grid_equal_atoms(self):
        d = ScoreDistribution.from_atoms([(0.5, 0.4), (0.50004, 0.6)])
        assert len(d.support) == 1
        assert d.support[0][1] == pytest.approx(1.0)

    def test_rejects_bad_mass(self):
        with pytest.raises(ScoringError):
            ScoreDistribution(support=((0.5, 0.5),))

    def test_sorted_unique(self):
        d = ScoreDistribution.from_atoms([(0.9, 0.2), (0.1, 0.8)])
        assert d.values() == (0.1, 0.9)


class TestScoreAlternative:
    def setup_method(self):
        self.building = make_building({"Z1": (plug("pc1", 60.0),)})
        self.zone = self.building.zones()[0]
        self.off = ControlAlternative(
            appliance_id="pc1",
            zone_id="Z1",
            kind=ApplianceKind.PLUG_LOAD,
            setting_index=2,
            setting=ControlSetting(0.0),
        )
        self.state = ZoneState(temp_C=22.0, setpoint_C=22.0, appliance_powers_W={"pc1": 60.0})
        self.scale = CurtailmentScaleParams(alpha2=10, p_max_W=100, p_min_W=10)

    def test_unoccupied_comfort_is_unity_atom(self):
        comfort, _ = score_alternative(self.off, self.zone, self.state, 0.0, 60.0, self.scale)
        assert comfort.support == ((1.0, 1.0),)

    def test_occupied_mixture(self):
        comfort, _ = score_alternative(self.off, self.zone, self.state, 0.7, 60.0, self.scale)
        assert comfort.support == ((0.0, 0.7), (1.0, pytest.approx(0.3)))

    def test_hvac_offset_comfort_at_steady_state(self):
        from conftest import hvac

        b = make_building({"Z1": (hvac("h1"),)})
        zone = b.zones()[0]
        alt = ControlAlternative(
            appliance_id="h1",
            zone_id="Z1",
            kind=ApplianceKind.HVAC_SETPOINT,
            setting_index=8,
            setting=ControlSetting(2.0),
        )
        scale = CurtailmentScaleParams(alpha2=10, p_max_W=1000, p_min_W=10)
        comfort, _ = score_alternative(
            alt, zone, ZoneState(22.0, 22.0, {}), 1.0, 300.0, scale
        )
        expected = comfort_hvac(24, 22, 3, 10)
        assert comfort.support == ((pytest.approx(expected, abs=1e-4), 1.0),)

    def test_mixture_mean_never_rises_with_occupancy(self):
        means = []
        for p in [0.0, 0.25, 0.5, 0.75, 1.0]:
            comfort, _ = score_alternative(self.off, self.zone, self.state, p, 60.0, self.scale)
            means.append(comfort.mean())
        assert all(a >= b - 1e-12 for a, b in zip(means, means[1:]))

    def test_distributions_valid(self):
        for p in [0.0, 0.3, 1.0]:
            for dist in score_alternative(self.off, self.zone, self.state, p, 60.0, self.scale):
                assert abs(sum(dist.probs()) - 1.0) < 1e-9
                assert list(dist.values()) == sorted(set(dist.values()))


class TestEstimateReduction:
    def test_plug_off_occupied(self):
        b = make_building({"Z1": (plug("pc1", 60.0),)})
        zone = b.zones()[0]
        alt = ControlAlternative("pc1", "Z1", ApplianceKind.PLUG_LOAD, 2, ControlSetting(0.0))
        state = ZoneState(22.0, 22.0, {"pc1": 60.0})
        assert estimate_reduction_W(alt, zone, state, True, -150.0) == 60.0

    def test_plug_off_unoccupied_idle(self):
        b = make_building({"Z1": (plug("pc1", 60.0),)})
        zone = b.zones()[0]
        alt = ControlAlternative("pc1", "Z1", ApplianceKind.PLUG_LOAD, 2, ControlSetting(0.0))
        # device already off: nothing to shed
        assert estimate_reduction_W(alt, zone, ZoneState(22.0, 22.0, {"pc1": 0.0}), False, -150.0) == 0.0
        # device left on in an empty zone: full shed available
        assert estimate_reduction_W(alt, zone, ZoneState(22.0, 22.0, {"pc1": 60.0}), False, -150.0) == 60.0

    def test_hvac_upward_offset_credit(self):
        from conftest import hvac

        b = make_building({"Z1": (hvac("h1"),)})
        zone = b.zones()[0]
        up2 = ControlAlternative("h1", "Z1", ApplianceKind.HVAC_SETPOINT, 8, ControlSetting(2.0))
        down = ControlAlternative("h1", "Z1", ApplianceKind.HVAC_SETPOINT, 3, ControlSetting(-3.0))
        state = ZoneState(22.0, 22.0, {})
        assert estimate_reduction_W(up2, zone, state, True, -150.0) == 300.0
        assert estimate_reduction_W(down, zone, state, True, -150.0) == 0.0


def test_fleet_scale_ignores_non_positive():
    scale = fleet_scale([100.0, -5.0, 0.0, 700.0])
    assert (scale.p_min_W, scale.p_max_W) == (100.0, 700.0)
    degenerate = fleet_scale([-5.0, 0.0])
    assert degenerate.p_max_W == degenerate.p_min_W
