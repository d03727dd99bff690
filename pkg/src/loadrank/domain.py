"""Core vocabulary: buildings, zones, control knobs and the alternatives built from them.

A building is a tree of floors, zones and appliances. Every appliance is a
control knob offering a small discrete set of settings; one (knob, setting)
pair is a control alternative, the atomic unit the ranking engine works on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

WEIGHT_TOL = 1e-9

# setting grids enforced per appliance kind
HVAC_OFFSET_STEP_C = 1.0
HVAC_OFFSET_MAX_C = 5.0
LIGHT_FRACTION_STEP = 0.20


class ValidationError(ValueError):
    """A building or criteria document violates a structural invariant."""


class ApplianceKind(str, Enum):
    HVAC_SETPOINT = "HvacSetpoint"
    DIMMABLE_LIGHT = "DimmableLight"
    PLUG_LOAD = "PlugLoad"


@dataclass(frozen=True)
class ControlSetting:
    """One discrete position of a control knob.

    ``value`` is a setpoint offset in degC for HVAC knobs, a power fraction
    for dimmable lights, and 1.0/0.0 (on/off) for plug loads.
    """

    value: float
    baseline: bool = False

    @property
    def label(self) -> str:
        return f"{self.value:+.1f}" if self.value < 0 or self.value > 0 else "0"


@dataclass(frozen=True)
class Appliance:
    id: str
    kind: ApplianceKind
    rated_power_W: float
    settings: tuple[ControlSetting, ...]

    def baseline_setting(self) -> ControlSetting:
        for s in self.settings:
            if s.baseline:
                return s
        raise ValidationError(f"appliance {self.id}: no baseline setting")


@dataclass(frozen=True)
class Zone:
    id: str
    floor_id: str
    desired_temp_C: float
    comfort_alpha: float
    comfort_delta_C: float
    appliances: tuple[Appliance, ...]


@dataclass(frozen=True)
class Floor:
    id: str
    zones: tuple[Zone, ...]


@dataclass(frozen=True)
class Building:
    id: str
    floors: tuple[Floor, ...]
    floor_area_m2: float

    def zones(self) -> list[Zone]:
        return [z for f in self.floors for z in f.zones]

    def zone(self, zone_id: str) -> Zone:
        for z in self.zones():
            if z.id == zone_id:
                return z
        raise KeyError(f"unknown zone {zone_id!r}")

    def appliance(self, appliance_id: str) -> tuple[Zone, Appliance]:
        for z in self.zones():
            for a in z.appliances:
                if a.id == appliance_id:
                    return z, a
        raise KeyError(f"unknown appliance {appliance_id!r}")


@dataclass(frozen=True)
class ControlAlternative:
    """One (knob, setting) pair; ``setting_index`` is 1-based within the knob."""

    appliance_id: str
    zone_id: str
    kind: ApplianceKind
    setting_index: int
    setting: ControlSetting

    def describe(self) -> str:
        if self.kind is ApplianceKind.HVAC_SETPOINT:
            what = f"setpoint {self.setting.value:+.0f} degC"
        elif self.kind is ApplianceKind.DIMMABLE_LIGHT:
            what = f"light {self.setting.value * 100:.0f}%"
        else:
            what = "plug on" if self.setting.value else "plug off"
        return f"{self.zone_id}/{self.appliance_id}: {what}"


@dataclass(frozen=True)
class CriteriaConfig:
    criteria: tuple[str, ...] = ("comfort", "curtailment")
    weights: tuple[float, ...] = (0.6, 0.4)
    threshold: float = 0.75


def validate_criteria(config: CriteriaConfig) -> None:
    """Check weight normalization and the open-interval classification threshold."""
    if len(config.criteria) != len(config.weights):
        raise ValidationError(
            f"{len(config.criteria)} criteria but {len(config.weights)} weights"
        )
    if len(config.criteria) == 0:
        raise ValidationError("criteria list is empty")
    for w in config.weights:
        if not math.isfinite(w) or w < 0:
            raise ValidationError(f"weight {w} violates w >= 0")
    total = sum(config.weights)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"weights sum to {total}, violating sum(w) == 1 +/- {WEIGHT_TOL}")
    if not 0.5 < config.threshold < 1.0:
        raise ValidationError(
            f"threshold {config.threshold} violates 0.5 < threshold < 1"
        )


def _validate_settings(appliance: Appliance) -> None:
    a = appliance
    if not a.settings:
        raise ValidationError(f"appliance {a.id}: empty settings list")
    n_baseline = sum(1 for s in a.settings if s.baseline)
    if n_baseline != 1:
        raise ValidationError(f"appliance {a.id}: {n_baseline} baseline settings, expected 1")
    values = [s.value for s in a.settings]
    if len(set(values)) != len(values):
        raise ValidationError(f"appliance {a.id}: duplicate setting values")
    if a.kind is ApplianceKind.HVAC_SETPOINT:
        for v in values:
            if abs(v) > HVAC_OFFSET_MAX_C + 1e-9:
                raise ValidationError(f"appliance {a.id}: offset {v} exceeds +/-{HVAC_OFFSET_MAX_C}")
            if abs(v - round(v / HVAC_OFFSET_STEP_C) * HVAC_OFFSET_STEP_C) > 1e-9:
                raise ValidationError(f"appliance {a.id}: offset {v} not a {HVAC_OFFSET_STEP_C} degC step")
    elif a.kind is ApplianceKind.DIMMABLE_LIGHT:
        for v in values:
            if not -1e-9 <= v <= 1.0 + 1e-9:
                raise ValidationError(f"appliance {a.id}: light fraction {v} outside [0, 1]")
            if abs(v - round(v / LIGHT_FRACTION_STEP) * LIGHT_FRACTION_STEP) > 1e-9:
                raise ValidationError(f"appliance {a.id}: fraction {v} not a {LIGHT_FRACTION_STEP} step")
    elif a.kind is ApplianceKind.PLUG_LOAD:
        if sorted(values) != [0.0, 1.0]:
            raise ValidationError(f"appliance {a.id}: plug settings must be exactly off/on")
    if not (a.rated_power_W > 0):
        raise ValidationError(f"appliance {a.id}: rated_power_W must be positive")


def validate_building(building: Building) -> None:
    if not building.floors:
        raise ValidationError(f"building {building.id}: no floors")
    if not (building.floor_area_m2 > 0):
        raise ValidationError(f"building {building.id}: floor_area_m2 must be positive")
    seen_zones: set[str] = set()
    seen_appliances: set[str] = set()
    for floor in building.floors:
        if not floor.zones:
            raise ValidationError(f"floor {floor.id}: no zones")
        for zone in floor.zones:
            if zone.id in seen_zones:
                raise ValidationError(f"zone id {zone.id} duplicated building-wide")
            seen_zones.add(zone.id)
            if zone.floor_id != floor.id:
                raise ValidationError(f"zone {zone.id}: floor_id {zone.floor_id} != {floor.id}")
            if not zone.comfort_alpha > 1:
                raise ValidationError(f"zone {zone.id}: comfort_alpha must be > 1")
            if not zone.comfort_delta_C > 0:
                raise ValidationError(f"zone {zone.id}: comfort_delta_C must be > 0")
            for appliance in zone.appliances:
                if appliance.id in seen_appliances:
                    raise ValidationError(f"appliance id {appliance.id} duplicated building-wide")
                seen_appliances.add(appliance.id)
                _validate_settings(appliance)


def enumerate_alternatives(
    building: Building, exclude_baseline: bool = True
) -> list[ControlAlternative]:
    """List every control alternative in deterministic (floor, zone, appliance, setting) order.

    The baseline setting of each knob is "take no action"; it is excluded from
    the ranked set by default and re-included with ``exclude_baseline=False``
    for diagnostics. Enumeration order doubles as the ranking tie-break key.
    """
    validate_building(building)
    out: list[ControlAlternative] = []
    for floor in building.floors:
        for zone in floor.zones:
            for appliance in zone.appliances:
                for idx, setting in enumerate(appliance.settings, start=1):
                    if exclude_baseline and setting.baseline:
                        continue
                    out.append(
                        ControlAlternative(
                            appliance_id=appliance.id,
                            zone_id=zone.id,
                            kind=appliance.kind,
                            setting_index=idx,
                            setting=setting,
                        )
                    )
    return out


# ---------------------------------------------------------------------------
# JSON document round-trip (the file format shared by the CLI and the service)
# ---------------------------------------------------------------------------

def building_to_dict(building: Building) -> dict:
    return {
        "id": building.id,
        "floor_area_m2": building.floor_area_m2,
        "floors": [
            {
                "id": f.id,
                "zones": [
                    {
                        "id": z.id,
                        "desired_temp_C": z.desired_temp_C,
                        "comfort_alpha": z.comfort_alpha,
                        "comfort_delta_C": z.comfort_delta_C,
                        "appliances": [
                            {
                                "id": a.id,
                                "kind": a.kind.value,
                                "rated_power_W": a.rated_power_W,
                                "settings": [
                                    {"value": s.value, "baseline": s.baseline}
                                    for s in a.settings
                                ],
                            }
                            for a in z.appliances
                        ],
                    }
                    for z in f.zones
                ],
            }
            for f in building.floors
        ],
    }


def building_from_dict(doc: dict) -> Building:
    try:
        floors = tuple(
            Floor(
                id=f["id"],
                zones=tuple(
                    Zone(
                        id=z["id"],
                        floor_id=f["id"],
                        desired_temp_C=float(z["desired_temp_C"]),
                        comfort_alpha=float(z["comfort_alpha"]),
                        comfort_delta_C=float(z["comfort_delta_C"]),
                        appliances=tuple(
                            Appliance(
                                id=a["id"],
                                kind=ApplianceKind(a["kind"]),
                                rated_power_W=float(a["rated_power_W"]),
                                settings=tuple(
                                    ControlSetting(
                                        value=float(s["value"]),
                                        baseline=bool(s.get("baseline", False)),
                                    )
                                    for s in a["settings"]
                                ),
                            )
                            for a in z.get("appliances", [])
                        ),
                    )
                    for z in f["zones"]
                ),
            )
            for f in doc["floors"]
        )
        building = Building(
            id=doc["id"],
            floors=floors,
            floor_area_m2=float(doc["floor_area_m2"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed building document: {exc}") from exc
    validate_building(building)
    return building


def load_building(path: str | Path) -> Building:
    with open(path) as fh:
        return building_from_dict(json.load(fh))


def save_building(building: Building, path: str | Path) -> None:
    Path(path).write_text(json.dumps(building_to_dict(building), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Stock buildings
# ---------------------------------------------------------------------------

def hvac_offset_settings() -> tuple[ControlSetting, ...]:
    return tuple(
        ControlSetting(value=float(v), baseline=(v == 0)) for v in range(-5, 6)
    )


def light_settings() -> tuple[ControlSetting, ...]:
    return tuple(
        ControlSetting(value=round(i * 0.2, 1), baseline=(i == 5)) for i in range(6)
    )


def plug_settings() -> tuple[ControlSetting, ...]:
    return (ControlSetting(value=1.0, baseline=True), ControlSetting(value=0.0))


def default_building(
    n_floors: int = 3,
    zones_per_floor: int = 5,
    light_rated_W: float = 200.0,
    plug_rated_W: float = 150.0,
) -> Building:
    """Office building with HVAC + dimmable light + PC per zone (five zones per floor)."""
    zone_tags = ["N", "S", "E", "W", "C"]
    floors = []
    for fi in range(1, n_floors + 1):
        fid = f"F{fi}"
        zones = []
        for zi in range(zones_per_floor):
            tag = zone_tags[zi % len(zone_tags)] + ("" if zi < len(zone_tags) else str(zi))
            zid = f"{fid}-{tag}"
            zones.append(
                Zone(
                    id=zid,
                    floor_id=fid,
                    desired_temp_C=22.0,
                    comfort_alpha=10.0,
                    comfort_delta_C=3.0,
                    appliances=(
                        Appliance(
                            id=f"{zid}-hvac",
                            kind=ApplianceKind.HVAC_SETPOINT,
                            rated_power_W=1.0,
                            settings=hvac_offset_settings(),
                        ),
                        Appliance(
                            id=f"{zid}-light",
                            kind=ApplianceKind.DIMMABLE_LIGHT,
                            rated_power_W=light_rated_W,
                            settings=light_settings(),
                        ),
                        Appliance(
                            id=f"{zid}-pc",
                            kind=ApplianceKind.PLUG_LOAD,
                            rated_power_W=plug_rated_W,
                            settings=plug_settings(),
                        ),
                    ),
                )
            )
        floors.append(Floor(id=fid, zones=tuple(zones)))
    return Building(id="office", floors=tuple(floors), floor_area_m2=46320.0 / 15 * n_floors * zones_per_floor)
