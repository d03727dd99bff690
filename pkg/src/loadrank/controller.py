"""Closed-loop curtailment: score, rank, greedily dispatch, restore.

During a curtailment event the controller re-plans every few minutes: it
scores every control alternative against the live zone states and occupancy
forecasts, ranks them, and walks the ranking top-down claiming at most one
alternative per knob until the estimated reduction covers the event target
(or everything eligible is claimed). The full command set is re-issued each
decision, so appliances whose alternatives fall out of the plan revert to
occupant-driven behaviour, and everything reverts when the event ends.

Eligibility means a positive estimated reduction: alternatives that would
increase load (un-dimming, downward setpoint moves) are never dispatched,
although they participate in the ranking.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from . import occupancy as occ_mod
from .chiller import ChillerModel
from .domain import (
    ApplianceKind,
    Building,
    ControlAlternative,
    CriteriaConfig,
    enumerate_alternatives,
    validate_criteria,
)
from .emulator import BuildingEmulator, Snapshot, ZoneSnap
from .mcdm import RankingResult, rank
from .scoring import (
    CurtailmentClampWarning,
    ZoneState,
    comfort_hvac,
    comfort_light,
    estimate_reduction_W,
    fleet_scale,
    score_alternative,
)

DEFAULT_EVENT_START_MIN = 8 * 60.0
DEFAULT_EVENT_END_MIN = 16 * 60.0
DEFAULT_DECISION_INTERVAL_MIN = 5.0


class ControllerError(RuntimeError):
    pass


@dataclass(frozen=True)
class CurtailmentEvent:
    """A bounded curtailment window with a power-reduction target.

    ``target_reduction_W=None`` means unlimited: dispatch every favorable
    action. ``weights`` optionally overrides the session criteria for the
    duration of the event.
    """

    start_minute: float = DEFAULT_EVENT_START_MIN
    end_minute: float = DEFAULT_EVENT_END_MIN
    target_reduction_W: float | None = 3000.0
    weights: CriteriaConfig | None = None

    def __post_init__(self):
        if self.end_minute < self.start_minute:
            raise ControllerError("event end precedes start")
        if self.target_reduction_W is not None and self.target_reduction_W < 0:
            raise ControllerError("target_reduction_W must be >= 0 (or None for unlimited)")
        if self.weights is not None:
            validate_criteria(self.weights)


@dataclass(frozen=True)
class Selection:
    alternative: ControlAlternative
    estimated_reduction_W: float


@dataclass(frozen=True)
class KnobLeft:
    """An unclaimed knob that still had a positive-reduction alternative."""

    appliance_id: str
    zone_id: str
    best_reduction_W: float


@dataclass(frozen=True)
class DispatchPlan:
    step_minute: float
    selected: tuple[Selection, ...]
    estimated_total_W: float
    ranking: RankingResult | None
    occupied: dict[str, bool]
    occupied_prob: dict[str, float]
    eligible_unselected: tuple[KnobLeft, ...] = ()
    target_unmet: bool = False
    reason: str | None = None

    def commands(self) -> dict[str, float]:
        return {s.alternative.appliance_id: s.alternative.setting.value for s in self.selected}


def _empty_plan(minute: float, reason: str) -> DispatchPlan:
    return DispatchPlan(
        step_minute=minute,
        selected=(),
        estimated_total_W=0.0,
        ranking=None,
        occupied={},
        occupied_prob={},
        reason=reason,
    )


@dataclass(frozen=True)
class RankedAlternatives:
    """Scored and ranked alternative set against one snapshot."""

    alternatives: tuple[ControlAlternative, ...]
    reductions_W: tuple[float, ...]
    occupied: dict[str, bool]
    occupied_prob: dict[str, float]
    ranking: RankingResult


def score_and_rank(
    snap: Snapshot,
    building: Building,
    occupancy_models: dict[str, occ_mod.OccupancyModel],
    chiller_model: ChillerModel,
    config: CriteriaConfig,
    horizon_min: float = DEFAULT_DECISION_INTERVAL_MIN,
    alpha2: float = 10.0,
) -> RankedAlternatives:
    """Score every alternative against the snapshot and rank the set.

    Reductions are estimated relative to the snapshot's actual appliance
    states; each zone's occupancy probability at the horizon drives its
    comfort mixtures. Pure function of its inputs.
    """
    if chiller_model is None or occupancy_models is None:
        raise ControllerError("missing occupancy or chiller model")
    validate_criteria(config)
    alts = enumerate_alternatives(building)
    occupied = {zid: zs.occupied for zid, zs in snap.zones.items()}
    occupied_prob: dict[str, float] = {}
    for z in building.zones():
        model = occupancy_models.get(z.id)
        if model is None:
            raise ControllerError(f"no occupancy model for zone {z.id}")
        zs = snap.zones[z.id]
        fc = occ_mod.forecast(
            model, (zs.occupied, zs.state_minutes), snap.clock_min, horizon_min
        )
        occupied_prob[z.id] = fc.prob_at_end()

    reductions = []
    for alt in alts:
        zone = building.zone(alt.zone_id)
        zs = snap.zones[zone.id]
        state = ZoneState(
            temp_C=zs.temp_C, setpoint_C=zs.setpoint_C, appliance_powers_W=snap.appliance_powers_W
        )
        reductions.append(
            estimate_reduction_W(
                alt, zone, state, occupied[zone.id], chiller_model.beta_z(zone.id)
            )
        )

    scale = fleet_scale(reductions, alpha2=alpha2)
    scores = []
    with warnings.catch_warnings():
        # non-positive reductions are routine here (downward moves), not a
        # fleet-statistics anomaly worth a clamp warning per alternative
        warnings.simplefilter("ignore", CurtailmentClampWarning)
        for alt, red in zip(alts, reductions):
            zone = building.zone(alt.zone_id)
            zs = snap.zones[zone.id]
            state = ZoneState(
                temp_C=zs.temp_C, setpoint_C=zs.setpoint_C, appliance_powers_W=snap.appliance_powers_W
            )
            scores.append(
                score_alternative(alt, zone, state, occupied_prob[zone.id], red, scale)
            )

    return RankedAlternatives(
        alternatives=tuple(alts),
        reductions_W=tuple(reductions),
        occupied=occupied,
        occupied_prob=occupied_prob,
        ranking=rank(scores, config),
    )


def decide(
    event: CurtailmentEvent,
    snap: Snapshot,
    building: Building,
    occupancy_models: dict[str, occ_mod.OccupancyModel],
    chiller_model: ChillerModel,
    config: CriteriaConfig,
    decision_interval_min: float = DEFAULT_DECISION_INTERVAL_MIN,
    alpha2: float = 10.0,
) -> DispatchPlan:
    """One planning pass: score, rank and greedily select against the target."""
    if not event.start_minute <= snap.clock_min < event.end_minute:
        return _empty_plan(snap.clock_min, "outside_window")
    cfg = event.weights if event.weights is not None else config
    ranked = score_and_rank(
        snap, building, occupancy_models, chiller_model, cfg, decision_interval_min, alpha2
    )
    alts = ranked.alternatives
    reductions = ranked.reductions_W
    occupied = ranked.occupied
    occupied_prob = ranked.occupied_prob
    ranking = ranked.ranking

    target = event.target_reduction_W
    selected: list[Selection] = []
    claimed: set[str] = set()
    total = 0.0
    for idx in ranking.order:
        if target is not None and total >= target:
            break
        alt, red = alts[idx], reductions[idx]
        if red <= 0.0 or alt.appliance_id in claimed:
            continue
        selected.append(Selection(alternative=alt, estimated_reduction_W=red))
        claimed.add(alt.appliance_id)
        total += red

    best_left: dict[str, KnobLeft] = {}
    for alt, red in zip(alts, reductions):
        if red > 0.0 and alt.appliance_id not in claimed:
            prev = best_left.get(alt.appliance_id)
            if prev is None or red > prev.best_reduction_W:
                best_left[alt.appliance_id] = KnobLeft(alt.appliance_id, alt.zone_id, red)

    return DispatchPlan(
        step_minute=snap.clock_min,
        selected=tuple(selected),
        estimated_total_W=total,
        ranking=ranking,
        occupied=occupied,
        occupied_prob=occupied_prob,
        eligible_unselected=tuple(sorted(best_left.values(), key=lambda k: k.appliance_id)),
        target_unmet=(target is not None and total < target),
    )


# ---------------------------------------------------------------------------
# Event execution against the emulator
# ---------------------------------------------------------------------------

@dataclass
class EventReport:
    event: dict
    criteria: dict
    decision_interval_min: float
    dt_seconds: float
    times_min: list[float] = field(default_factory=list)
    total_power_W: list[float] = field(default_factory=list)
    baseline_power_W: list[float] = field(default_factory=list)
    chiller_power_W: list[float] = field(default_factory=list)
    baseline_chiller_W: list[float] = field(default_factory=list)
    zone_series: dict[str, dict[str, list]] = field(default_factory=dict)
    decisions: list[dict] = field(default_factory=list)
    restored_after_min: float | None = None
    summary: dict = field(default_factory=dict)

    def reduction_series_W(self) -> list[float]:
        return [b - t for b, t in zip(self.baseline_power_W, self.total_power_W)]


def zone_comfort(building: Building, snap: Snapshot, zone_id: str) -> float:
    """Comfort of the zone's current state: mean over its appliances, 1 when empty."""
    zs = snap.zones[zone_id]
    if not zs.occupied:
        return 1.0
    zone = building.zone(zone_id)
    parts = []
    for a in zone.appliances:
        if a.kind is ApplianceKind.HVAC_SETPOINT:
            parts.append(
                comfort_hvac(zs.temp_C, zone.desired_temp_C, zone.comfort_delta_C, zone.comfort_alpha)
            )
        elif a.kind is ApplianceKind.DIMMABLE_LIGHT:
            power = min(snap.appliance_powers_W.get(a.id, 0.0), a.rated_power_W)
            parts.append(comfort_light(power, a.rated_power_W))
        else:
            parts.append(1.0 if snap.appliance_powers_W.get(a.id, 0.0) > 0 else 0.0)
    return sum(parts) / len(parts) if parts else 1.0


def natural_view(snap: Snapshot, building: Building) -> Snapshot:
    """The snapshot with command effects removed: the uncommanded posture.

    Appliance powers revert to occupant demand (rated while occupied, zero
    otherwise) and setpoints to the zone's desired temperature. Re-planning
    against this view makes every plan a complete restatement of the
    curtailment posture instead of an increment on standing commands, so a
    knob keeps its command only while it stays in the plan.
    """
    powers = dict(snap.appliance_powers_W)
    zones = {}
    for z in building.zones():
        zs = snap.zones[z.id]
        zones[z.id] = ZoneSnap(
            temp_C=zs.temp_C,
            setpoint_C=z.desired_temp_C,
            occupied=zs.occupied,
            state_minutes=zs.state_minutes,
        )
        for a in z.appliances:
            if a.kind is ApplianceKind.HVAC_SETPOINT:
                continue
            powers[a.id] = a.rated_power_W if zs.occupied else 0.0
    return Snapshot(
        clock_min=snap.clock_min,
        outdoor_temp_C=snap.outdoor_temp_C,
        zones=zones,
        appliance_powers_W=powers,
        chiller_power_W=snap.chiller_power_W,
        total_power_W=snap.total_power_W,
    )


def selection_dict(sel: Selection) -> dict:
    return {
        "appliance_id": sel.alternative.appliance_id,
        "zone_id": sel.alternative.zone_id,
        "kind": sel.alternative.kind.value,
        "setting_value": sel.alternative.setting.value,
        "setting_index": sel.alternative.setting_index,
        "estimated_reduction_W": round(sel.estimated_reduction_W, 3),
    }


def run_event(
    event: CurtailmentEvent,
    emulator: BuildingEmulator,
    occupancy_models: dict[str, occ_mod.OccupancyModel],
    chiller_model: ChillerModel,
    config: CriteriaConfig,
    decision_interval_min: float = DEFAULT_DECISION_INTERVAL_MIN,
    dt_seconds: float = 60.0,
) -> EventReport:
    """Drive the emulator through the event and report against the counterfactual.

    The baseline ("without any curtailment") series comes from replaying a
    clone of the emulator taken at the event start with no commands: same
    seed, same occupancy, same noise draws, so the comparison isolates the
    controller's actions exactly. One decision interval past the event end
    all commands are cleared and the restore is verified.
    """
    building = emulator.building
    report = EventReport(
        event={
            "start_minute": event.start_minute,
            "end_minute": event.end_minute,
            "target_reduction_W": event.target_reduction_W,
            "weights": list(event.weights.weights) if event.weights else None,
        },
        criteria={
            "criteria": list(config.criteria),
            "weights": list(config.weights),
            "threshold": config.threshold,
        },
        decision_interval_min=decision_interval_min,
        dt_seconds=dt_seconds,
    )
    report.zone_series = {
        z.id: {
            "temp_C": [],
            "setpoint_C": [],
            "occupied": [],
            "comfort": [],
            "light_W": [],
            "plug_W": [],
        }
        for z in building.zones()
    }
    if event.end_minute == event.start_minute:
        report.summary = {"empty": True}
        return report
    if emulator.clock_min > event.start_minute:
        raise ControllerError(
            f"emulator clock {emulator.clock_min} is already past the event start"
        )

    while emulator.clock_min < event.start_minute - 1e-9:
        emulator.step(dt_seconds)

    baseline = emulator.clone()
    horizon_end = event.end_minute + decision_interval_min

    next_decision = event.start_minute
    while emulator.clock_min < horizon_end - 1e-9:
        now = emulator.clock_min
        if now >= next_decision - 1e-9:
            if now < event.end_minute - 1e-9:
                plan = decide(
                    event,
                    natural_view(emulator.snapshot(), building),
                    building,
                    occupancy_models,
                    chiller_model,
                    config,
                    decision_interval_min,
                )
                commands: dict[str, float | None] = dict(plan.commands())
                for aid in emulator.active_command_ids():
                    if aid not in commands:
                        commands[aid] = None
                emulator.send_commands(commands)
                report.decisions.append(
                    {
                        "minute": now,
                        "selected": [selection_dict(s) for s in plan.selected],
                        "estimated_total_W": round(plan.estimated_total_W, 3),
                        "target_unmet": plan.target_unmet,
                        "occupied": {z: bool(v) for z, v in sorted(plan.occupied.items())},
                        "occupied_prob": {z: round(v, 6) for z, v in sorted(plan.occupied_prob.items())},
                        "eligible_unselected": [
                            {
                                "appliance_id": k.appliance_id,
                                "zone_id": k.zone_id,
                                "best_reduction_W": round(k.best_reduction_W, 3),
                            }
                            for k in plan.eligible_unselected
                        ],
                    }
                )
            else:
                emulator.clear_all_commands()
            next_decision += decision_interval_min

        snap = emulator.step(dt_seconds)
        report.times_min.append(snap.clock_min)
        report.total_power_W.append(round(snap.total_power_W, 3))
        report.chiller_power_W.append(round(snap.chiller_power_W, 3))
        for z in building.zones():
            zs = snap.zones[z.id]
            series = report.zone_series[z.id]
            series["temp_C"].append(round(zs.temp_C, 4))
            series["setpoint_C"].append(round(zs.setpoint_C, 4))
            series["occupied"].append(int(zs.occupied))
            series["comfort"].append(round(zone_comfort(building, snap, z.id), 4))
            light = sum(
                snap.appliance_powers_W.get(a.id, 0.0)
                for a in z.appliances
                if a.kind is ApplianceKind.DIMMABLE_LIGHT
            )
            plug = sum(
                snap.appliance_powers_W.get(a.id, 0.0)
                for a in z.appliances
                if a.kind is ApplianceKind.PLUG_LOAD
            )
            series["light_W"].append(round(light, 3))
            series["plug_W"].append(round(plug, 3))

    # counterfactual: same horizon, no commands
    while baseline.clock_min < horizon_end - 1e-9:
        snap = baseline.step(dt_seconds)
        report.baseline_power_W.append(round(snap.total_power_W, 3))
        report.baseline_chiller_W.append(round(snap.chiller_power_W, 3))

    # restore check: after event end (+ one interval) every appliance matches
    # the uncommanded baseline
    final = emulator.snapshot()
    final_base = baseline.snapshot()
    if all(
        abs(final.appliance_powers_W[a] - final_base.appliance_powers_W[a]) < 1e-9
        for a in final.appliance_powers_W
    ) and all(
        abs(final.zones[z].setpoint_C - final_base.zones[z].setpoint_C) < 1e-9
        for z in final.zones
    ):
        report.restored_after_min = round(final.clock_min - event.end_minute, 3)

    in_event = [
        i for i, t in enumerate(report.times_min) if event.start_minute < t <= event.end_minute
    ]
    reductions = report.reduction_series_W()
    event_reductions = [reductions[i] for i in in_event]
    report.summary = {
        "mean_reduction_W": round(_mean(event_reductions), 3),
        "max_reduction_W": round(max(event_reductions), 3) if event_reductions else 0.0,
        "steps": len(report.times_min),
        "decisions": len(report.decisions),
        "any_target_unmet": any(d["target_unmet"] for d in report.decisions),
    }
    return report


def _mean(xs: list[float]) -> float:
    return sum(xs) / len(xs) if xs else 0.0


def report_to_dict(report: EventReport) -> dict:
    return {
        "event": report.event,
        "criteria": report.criteria,
        "decision_interval_min": report.decision_interval_min,
        "dt_seconds": report.dt_seconds,
        "summary": report.summary,
        "restored_after_min": report.restored_after_min,
        "series": {
            "times_min": report.times_min,
            "total_power_W": report.total_power_W,
            "baseline_power_W": report.baseline_power_W,
            "chiller_power_W": report.chiller_power_W,
            "baseline_chiller_W": report.baseline_chiller_W,
            "reduction_W": [round(r, 3) for r in report.reduction_series_W()],
        },
        "zones": report.zone_series,
        "decisions": report.decisions,
    }
