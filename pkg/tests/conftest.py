import numpy as np
import pytest

from loadrank.chiller import ChillerModel
from loadrank.domain import (
    Appliance,
    ApplianceKind,
    Building,
    ControlSetting,
    Floor,
    Zone,
    hvac_offset_settings,
    light_settings,
    plug_settings,
)
from loadrank.occupancy import OccupancyModel


def make_zone(zone_id="Z1", floor_id="F1", appliances=(), desired=22.0):
    return Zone(
        id=zone_id,
        floor_id=floor_id,
        desired_temp_C=desired,
        comfort_alpha=10.0,
        comfort_delta_C=3.0,
        appliances=tuple(appliances),
    )


def make_building(zones_appliances: dict[str, tuple] | None = None) -> Building:
    """One-floor building; ``zones_appliances`` maps zone id -> appliances."""
    zones_appliances = zones_appliances if zones_appliances is not None else {"Z1": ()}
    zones = tuple(make_zone(zid, "F1", apps) for zid, apps in zones_appliances.items())
    return Building(id="test", floors=(Floor(id="F1", zones=zones),), floor_area_m2=100.0)


def plug(appliance_id="pc1", rated=60.0):
    return Appliance(
        id=appliance_id, kind=ApplianceKind.PLUG_LOAD, rated_power_W=rated, settings=plug_settings()
    )


def light(appliance_id="light1", rated=100.0):
    return Appliance(
        id=appliance_id,
        kind=ApplianceKind.DIMMABLE_LIGHT,
        rated_power_W=rated,
        settings=light_settings(),
    )


def hvac(appliance_id="hvac1"):
    return Appliance(
        id=appliance_id,
        kind=ApplianceKind.HVAC_SETPOINT,
        rated_power_W=1.0,
        settings=hvac_offset_settings(),
    )


def constant_occupancy_model(zone_id: str, occupied: bool) -> OccupancyModel:
    """Chain that jumps to (and stays in) one occupancy state; single bucket."""
    matrices = np.zeros((48, 2, 2))
    target = 1 if occupied else 0
    matrices[:, :, target] = 1.0
    return OccupancyModel(
        zone_id=zone_id,
        window_minutes=30,
        interval_minutes=5,
        bucket_bounds_min=(),
        matrices=matrices,
    )


def flat_chiller(building: Building, beta_z: float = -150.0) -> ChillerModel:
    zone_ids = tuple(z.id for z in building.zones())
    beta0 = 1500.0 * len(zone_ids) - beta_z * sum(z.desired_temp_C for z in building.zones())
    return ChillerModel(
        zone_ids=zone_ids,
        beta0_W=beta0,
        beta_out_W_per_C=200.0,
        beta_z_W_per_C=tuple(beta_z for _ in zone_ids),
    )


@pytest.fixture
def pc_building():
    return make_building({"Z1": (plug(),)})
