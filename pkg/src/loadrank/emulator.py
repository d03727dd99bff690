"""Lumped-parameter digital twin of a multi-zone office building.

Each zone is a first-order RC node: one thermal capacitance behind one
envelope resistance to the outdoor air, with internal gains and a
proportional-control cooling coil that drives the zone toward its setpoint
and saturates at the coil capacity. Chiller power follows the affine
setpoint/outdoor-temperature model plus a small multiplicative noise term.
Occupants arrive and leave per zone according to sampled Markov occupancy
chains, and lights/plug loads follow the occupants unless a control command
pins them.

The emulator is a single-owner state machine: one actor steps it, commands
enter through a serialized inbox applied at step boundaries, and readers get
immutable snapshots. Snapshot streams persisted as CSV are the "historical
data" consumed by the model-fitting code.
"""

from __future__ import annotations

import copy
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import occupancy as occ_mod
from .chiller import ChillerModel, predict_power
from .domain import Appliance, ApplianceKind, Building, validate_building

DT_MIN_S = 10.0
DT_MAX_S = 900.0


class EmulatorError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeatherProfile:
    """Piecewise-linear outdoor temperature vs absolute minute."""

    minutes: tuple[float, ...]
    temps_C: tuple[float, ...]

    def __post_init__(self):
        if len(self.minutes) != len(self.temps_C) or not self.minutes:
            raise EmulatorError("weather profile needs matching, non-empty breakpoints")
        if any(b <= a for a, b in zip(self.minutes, self.minutes[1:])):
            raise EmulatorError("weather breakpoints must be strictly increasing")

    def covers(self, minute: float) -> bool:
        return self.minutes[0] <= minute <= self.minutes[-1]

    def temp_at(self, minute: float) -> float:
        if not self.covers(minute):
            raise EmulatorError(
                f"weather profile covers [{self.minutes[0]}, {self.minutes[-1]}] min, asked for {minute}"
            )
        return float(np.interp(minute, self.minutes, self.temps_C))


def constant_weather(temp_C: float, days: int = 400) -> WeatherProfile:
    return WeatherProfile((0.0, days * 1440.0), (temp_C, temp_C))


def sinusoid_weather(
    min_temp_C: float, max_temp_C: float, peak_minute: float = 900.0, days: int = 400
) -> WeatherProfile:
    """Daily temperature wave: minimum at midnight, maximum at ``peak_minute``.

    Built from two half-cosine arcs per day (midnight to peak, peak to
    midnight), sampled at 15-minute breakpoints.
    """
    minutes = []
    temps = []
    amp = (max_temp_C - min_temp_C) / 2.0
    for d in range(days):
        for m in range(0, 1440, 15):
            if m <= peak_minute:
                phase = math.pi * m / peak_minute
            else:
                phase = math.pi * (1.0 + (m - peak_minute) / (1440.0 - peak_minute))
            minutes.append(d * 1440.0 + m)
            temps.append(min_temp_C + amp * (1.0 - math.cos(phase)))
    minutes.append(days * 1440.0)
    temps.append(min_temp_C)
    return WeatherProfile(tuple(minutes), tuple(temps))


@dataclass
class ZoneThermalState:
    temp_C: float
    setpoint_C: float
    thermal_capacitance_J_per_K: float = 5e6
    envelope_resistance_K_per_W: float = 2e-3
    internal_gain_W: float = 200.0
    hvac_kp_W_per_K: float = 20000.0
    hvac_capacity_W: float = 15000.0


@dataclass(frozen=True)
class ZoneSnap:
    temp_C: float
    setpoint_C: float
    occupied: bool
    state_minutes: float  # time spent in the current occupancy state


@dataclass(frozen=True)
class Snapshot:
    """Immutable measurement record of one emulator step."""

    clock_min: float
    outdoor_temp_C: float
    zones: dict[str, ZoneSnap]
    appliance_powers_W: dict[str, float]
    chiller_power_W: float
    total_power_W: float


def default_true_chiller(
    building: Building,
    beta_z_W_per_C: float = -150.0,
    beta_out_W_per_C: float = 200.0,
    base_W_per_zone: float = 1500.0,
) -> ChillerModel:
    """Ground-truth chiller coefficients sized so the model stays positive.

    The intercept absorbs the negative setpoint terms at design conditions,
    and the per-zone sensitivity is chosen so a +1 degC move sheds about as
    much power as one zone's lighting load.
    """
    zones = building.zones()
    beta0 = base_W_per_zone * len(zones) - beta_z_W_per_C * sum(z.desired_temp_C for z in zones)
    return ChillerModel(
        zone_ids=tuple(z.id for z in zones),
        beta0_W=beta0,
        beta_out_W_per_C=beta_out_W_per_C,
        beta_z_W_per_C=tuple(beta_z_W_per_C for _ in zones),
    )


@dataclass
class _ZoneOccupancy:
    model: occ_mod.OccupancyModel | None
    state_index: int
    occupied: bool
    duration_min: float
    next_update_min: float


class BuildingEmulator:
    """Steps the building forward; the single owner of all mutable state."""

    def __init__(
        self,
        building: Building,
        true_chiller: ChillerModel,
        weather: WeatherProfile,
        occupancy_models: dict[str, occ_mod.OccupancyModel] | None = None,
        seed: int = 0,
        start_minute: float = 0.0,
        chiller_noise_frac: float = 0.02,
    ):
        validate_building(building)
        self.building = building
        self.true_chiller = true_chiller
        self.weather = weather
        self.chiller_noise_frac = chiller_noise_frac
        self.clock_min = float(start_minute)

        zone_ids = tuple(z.id for z in building.zones())
        if tuple(true_chiller.zone_ids) != zone_ids:
            raise EmulatorError("chiller model zone order must match the building")

        occ_seed, noise_seed = np.random.SeedSequence(seed).spawn(2)
        self._rng_occ = np.random.default_rng(occ_seed)
        self._rng_noise = np.random.default_rng(noise_seed)

        self.zones: dict[str, ZoneThermalState] = {
            z.id: ZoneThermalState(temp_C=z.desired_temp_C, setpoint_C=z.desired_temp_C)
            for z in building.zones()
        }
        self._occ: dict[str, _ZoneOccupancy] = {}
        for z in building.zones():
            model = (occupancy_models or {}).get(z.id)
            state_index = model.state_index(False, 600.0) if model else 0
            self._occ[z.id] = _ZoneOccupancy(
                model=model,
                state_index=state_index,
                occupied=False,
                duration_min=600.0,
                next_update_min=self.clock_min + (model.interval_minutes if model else math.inf),
            )

        self._appliances: dict[str, tuple[str, Appliance]] = {
            a.id: (z.id, a) for z in building.zones() for a in z.appliances
        }
        # command value semantics: HVAC -> setpoint offset degC; light -> power
        # fraction cap; plug -> 0/1 cap. None is never stored (None clears).
        self._commands: dict[str, float] = {}
        self._inbox: list[dict[str, float | None]] = []

        self.appliance_powers_W: dict[str, float] = {a: 0.0 for a in self._appliances}
        self._refresh_powers(noisy=False)

    # -- command inbox -------------------------------------------------------

    def send_commands(self, commands: dict[str, float | None]) -> None:
        """Queue control commands; applied at the next step boundary.

        A value of None clears the command for that appliance (reverting it
        to occupant-driven behaviour or the desired setpoint).
        """
        for aid in commands:
            if aid not in self._appliances:
                raise EmulatorError(f"unknown appliance {aid!r} in command")
        self._inbox.append(dict(commands))

    def clear_all_commands(self) -> None:
        self._inbox.append({aid: None for aid in self._commands})

    def active_command_ids(self) -> tuple[str, ...]:
        """Appliances currently pinned by a command (inbox not yet applied excluded)."""
        return tuple(sorted(self._commands))

    def _apply_inbox(self) -> None:
        for batch in self._inbox:
            for aid, value in batch.items():
                if value is None:
                    self._commands.pop(aid, None)
                else:
                    self._commands[aid] = float(value)
        self._inbox.clear()

    # -- stepping -------------------------------------------------------------

    def inject_weather(self, profile: WeatherProfile) -> None:
        if not profile.covers(self.clock_min):
            raise EmulatorError("weather profile does not cover the current clock")
        self.weather = profile

    def step(self, dt_seconds: float = 60.0) -> Snapshot:
        if not DT_MIN_S <= dt_seconds <= DT_MAX_S:
            raise EmulatorError(f"dt {dt_seconds} s outside [{DT_MIN_S}, {DT_MAX_S}]")
        dt_min = dt_seconds / 60.0
        if not self.weather.covers(self.clock_min + dt_min):
            raise EmulatorError("weather profile does not cover the step horizon")
        self._apply_inbox()

        t_out = self.weather.temp_at(self.clock_min)
        for z in self.building.zones():
            st = self.zones[z.id]
            if dt_seconds >= 0.5 * st.thermal_capacitance_J_per_K * st.envelope_resistance_K_per_W:
                raise EmulatorError(f"dt {dt_seconds} s violates the zone {z.id} stability bound")
            hvac_cmd = next(
                (
                    self._commands[a.id]
                    for a in z.appliances
                    if a.kind is ApplianceKind.HVAC_SETPOINT and a.id in self._commands
                ),
                None,
            )
            st.setpoint_C = z.desired_temp_C + (hvac_cmd if hvac_cmd is not None else 0.0)
            cooling = min(
                max(st.hvac_kp_W_per_K * (st.temp_C - st.setpoint_C), 0.0),
                st.hvac_capacity_W,
            )
            flux = (t_out - st.temp_C) / st.envelope_resistance_K_per_W + st.internal_gain_W - cooling
            st.temp_C += dt_seconds / st.thermal_capacitance_J_per_K * flux

        self.clock_min += dt_min
        self._advance_occupancy()
        self._refresh_powers(noisy=True)
        return self.snapshot()

    def _advance_occupancy(self) -> None:
        for zid, zo in self._occ.items():
            if zo.model is None:
                continue
            while zo.next_update_min <= self.clock_min:
                at = zo.next_update_min - zo.model.interval_minutes
                zo.state_index = occ_mod.step_state(zo.model, zo.state_index, at, self._rng_occ)
                now_occ = zo.state_index >= zo.model.n_buckets
                if now_occ == zo.occupied:
                    zo.duration_min += zo.model.interval_minutes
                else:
                    zo.duration_min = 0.0
                zo.occupied = now_occ
                zo.next_update_min += zo.model.interval_minutes

    def _refresh_powers(self, noisy: bool) -> None:
        for aid, (zid, appliance) in self._appliances.items():
            if appliance.kind is ApplianceKind.HVAC_SETPOINT:
                self.appliance_powers_W[aid] = 0.0  # HVAC shows up in chiller power
                continue
            demand = appliance.rated_power_W if self._occ[zid].occupied else 0.0
            limit = self._commands.get(aid, 1.0)
            self.appliance_powers_W[aid] = limit * demand

        setpoints = tuple(self.zones[z.id].setpoint_C for z in self.building.zones())
        t_out = self.weather.temp_at(self.clock_min)
        pred = predict_power(self.true_chiller, t_out, setpoints)
        noise = (
            self._rng_noise.standard_normal() * self.chiller_noise_frac * abs(pred)
            if noisy
            else 0.0
        )
        self.chiller_power_W = max(0.0, pred + noise)

    # -- observation ----------------------------------------------------------

    def snapshot(self) -> Snapshot:
        total = self.chiller_power_W + sum(self.appliance_powers_W.values())
        return Snapshot(
            clock_min=self.clock_min,
            outdoor_temp_C=self.weather.temp_at(self.clock_min),
            zones={
                zid: ZoneSnap(
                    temp_C=st.temp_C,
                    setpoint_C=st.setpoint_C,
                    occupied=self._occ[zid].occupied,
                    state_minutes=self._occ[zid].duration_min,
                )
                for zid, st in self.zones.items()
            },
            appliance_powers_W=dict(self.appliance_powers_W),
            chiller_power_W=self.chiller_power_W,
            total_power_W=total,
        )

    def clone(self) -> "BuildingEmulator":
        """Deep copy including RNG state, for counterfactual replays."""
        return copy.deepcopy(self)


# ---------------------------------------------------------------------------
# Snapshot log persistence (the historical-data CSV)
# ---------------------------------------------------------------------------

def log_header(building: Building) -> list[str]:
    cols = ["timestamp", "outdoor_temp_C", "chiller_power_W", "total_power_W"]
    for z in building.zones():
        cols += [f"temp_{z.id}_C", f"setpoint_{z.id}_C", f"occupied_{z.id}", f"state_min_{z.id}"]
    for z in building.zones():
        for a in z.appliances:
            cols.append(f"power_{a.id}_W")
    return cols


def snapshot_row(snap: Snapshot, building: Building) -> list:
    row: list = [
        occ_mod.minute_to_iso(snap.clock_min),
        round(snap.outdoor_temp_C, 4),
        round(snap.chiller_power_W, 3),
        round(snap.total_power_W, 3),
    ]
    for z in building.zones():
        zs = snap.zones[z.id]
        row += [round(zs.temp_C, 4), round(zs.setpoint_C, 4), int(zs.occupied), round(zs.state_minutes, 1)]
    for z in building.zones():
        for a in z.appliances:
            row.append(round(snap.appliance_powers_W[a.id], 3))
    return row


def write_snapshot_log(snapshots: list[Snapshot], building: Building, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(log_header(building))
        for snap in snapshots:
            writer.writerow(snapshot_row(snap, building))


def occupancy_traces_from_log(
    path: str | Path,
    zone_ids: list[str] | None = None,
    interval_minutes: int = occ_mod.DEFAULT_INTERVAL_MIN,
) -> dict[str, occ_mod.OccupancyTrace]:
    """Extract per-zone occupancy traces from a snapshot log CSV.

    Rows are resampled onto the occupancy module's uniform grid, so logs
    recorded at a finer step than the occupancy interval ingest cleanly.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if zone_ids is None:
            zone_ids = [c[len("occupied_"):] for c in header if c.startswith("occupied_")]
        samples: dict[str, list[tuple[float, bool]]] = {z: [] for z in zone_ids}
        for row in reader:
            t = occ_mod.iso_to_minute(row["timestamp"])
            for z in zone_ids:
                samples[z].append((t, row[f"occupied_{z}"] == "1"))
    return {
        z: occ_mod.trace_from_samples(z, s, interval_minutes) for z, s in samples.items()
    }
