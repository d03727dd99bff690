"""Scenario assembly: ground-truth models, history generation, model fitting.

Wires the pieces into runnable setups: per-zone occupant behaviour models
(fit on synthetic office schedules), an emulator around them, an excited
historical run for system identification, and the fits that turn the log
back into the controller's occupancy and chiller models.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import chiller as chiller_mod
from . import occupancy as occ_mod
from .chiller import ChillerModel
from .domain import ApplianceKind, Building
from .emulator import (
    BuildingEmulator,
    Snapshot,
    WeatherProfile,
    default_true_chiller,
    occupancy_traces_from_log,
    sinusoid_weather,
    write_snapshot_log,
)

DEFAULT_WEATHER_MIN_C = 28.0
DEFAULT_WEATHER_MAX_C = 38.0
TRAINING_DAYS = 40


def ground_truth_occupancy(
    building: Building,
    seed: int,
    days: int = TRAINING_DAYS,
    profile: occ_mod.OfficeProfile | None = None,
) -> dict[str, occ_mod.OccupancyModel]:
    """Occupant-behaviour chains per zone, fit on synthetic office schedules.

    Each zone gets an independently seeded schedule so arrival/lunch/meeting
    patterns differ across zones while sharing the same qualitative shape.
    """
    profile = profile or occ_mod.OfficeProfile()
    seeds = np.random.SeedSequence(seed).spawn(len(building.zones()))
    models = {}
    for z, ss in zip(building.zones(), seeds):
        trace = occ_mod.generate_office_trace(
            profile, seed=int(ss.generate_state(1)[0] % 2**31), days=days, zone_id=z.id
        )
        models[z.id] = occ_mod.fit_occupancy(trace)
    return models


def make_emulator(
    building: Building,
    seed: int,
    weather: WeatherProfile | None = None,
    true_chiller: ChillerModel | None = None,
    occupancy_models: dict[str, occ_mod.OccupancyModel] | None = None,
    start_minute: float = 0.0,
) -> BuildingEmulator:
    occ_models = (
        occupancy_models
        if occupancy_models is not None
        else ground_truth_occupancy(building, seed=seed + 1)
    )
    return BuildingEmulator(
        building=building,
        true_chiller=true_chiller or default_true_chiller(building),
        weather=weather or sinusoid_weather(DEFAULT_WEATHER_MIN_C, DEFAULT_WEATHER_MAX_C),
        occupancy_models=occ_models,
        seed=seed,
        start_minute=start_minute,
    )


def generate_history(
    emulator: BuildingEmulator,
    days: int,
    dt_seconds: float = 300.0,
    excitation_seed: int | None = 7,
    excitation_max_offset_C: float = 3.0,
) -> list[Snapshot]:
    """Run the emulator for ``days`` and collect one snapshot per step.

    By default the zonal setpoints are excited with a fresh random offset
    pattern every hour so the chiller regression has setpoint variance to
    identify against; pass ``excitation_seed=None`` for an unexcited run.
    """
    if days <= 0:
        raise ValueError("days must be >= 1")
    rng = np.random.default_rng(excitation_seed) if excitation_seed is not None else None
    hvac_ids = [
        a.id
        for z in emulator.building.zones()
        for a in z.appliances
        if a.kind is ApplianceKind.HVAC_SETPOINT
    ]
    snapshots: list[Snapshot] = []
    end = emulator.clock_min + days * 1440.0
    next_excite = emulator.clock_min
    while emulator.clock_min < end - 1e-9:
        if rng is not None and emulator.clock_min >= next_excite - 1e-9:
            offsets = rng.integers(
                -int(excitation_max_offset_C), int(excitation_max_offset_C) + 1, len(hvac_ids)
            )
            emulator.send_commands({aid: float(o) for aid, o in zip(hvac_ids, offsets)})
            next_excite += 60.0
        snapshots.append(emulator.step(dt_seconds))
    emulator.clear_all_commands()
    return snapshots


@dataclass(frozen=True)
class FittedModels:
    occupancy: dict[str, occ_mod.OccupancyModel]
    chiller: ChillerModel


def fit_models_from_log(
    log_path: str | Path, building: Building, laplace: float = 0.5
) -> FittedModels:
    """Fit the controller's occupancy and chiller models from a snapshot log.

    A little Laplace smoothing keeps rarely visited occupancy rows from
    locking up; the chiller fit keeps its default hot-weather filter.
    """
    zone_ids = tuple(z.id for z in building.zones())
    traces = occupancy_traces_from_log(log_path, list(zone_ids))
    occupancy_models = {
        zid: occ_mod.fit_occupancy(traces[zid], laplace=laplace) for zid in zone_ids
    }
    observations, _ = chiller_mod.observations_from_csv(log_path, zone_ids)
    chiller_model = chiller_mod.fit_chiller(observations, zone_ids)
    return FittedModels(occupancy=occupancy_models, chiller=chiller_model)


def fit_models_from_snapshots(
    snapshots: list[Snapshot], building: Building, tmpdir: str | Path, laplace: float = 0.5
) -> FittedModels:
    path = Path(tmpdir) / "history.csv"
    write_snapshot_log(snapshots, building, path)
    return fit_models_from_log(path, building, laplace=laplace)


def save_models(models: FittedModels, outdir: str | Path) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for zid, model in models.occupancy.items():
        p = outdir / f"occupancy_{zid}.json"
        occ_mod.save_model(model, p)
        paths[f"occupancy_{zid}"] = p
    p = outdir / "chiller.json"
    chiller_mod.save_model(models.chiller, p)
    paths["chiller"] = p
    return paths


def load_models(building: Building, modeldir: str | Path) -> FittedModels:
    modeldir = Path(modeldir)
    occupancy_models = {}
    for z in building.zones():
        p = modeldir / f"occupancy_{z.id}.json"
        if not p.exists():
            raise FileNotFoundError(f"missing occupancy model {p}")
        occupancy_models[z.id] = occ_mod.load_model(p)
    return FittedModels(
        occupancy=occupancy_models,
        chiller=chiller_mod.load_model(modeldir / "chiller.json"),
    )
