"""HTTP backend: one session owning a building, its models, and an emulation.

The service manages control and data flow between the console, the
controller, the fitted models and the emulator. A background thread owns
emulator stepping; API handlers read immutable snapshots and write through
the emulator's serialized command inbox, so no request ever observes a
mid-step state. The measurement log is append-only.
"""

from __future__ import annotations

import csv
import io
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import occupancy as occ_mod
from .chiller import IdentifiabilityError
from .controller import (
    DEFAULT_DECISION_INTERVAL_MIN,
    ControllerError,
    CurtailmentEvent,
    EventReport,
    decide,
    natural_view,
    report_to_dict,
    score_and_rank,
    selection_dict,
    zone_comfort,
)
from .domain import (
    Building,
    CriteriaConfig,
    ValidationError,
    building_from_dict,
    building_to_dict,
)
from .emulator import BuildingEmulator, Snapshot, log_header, snapshot_row
from .scenario import (
    FittedModels,
    fit_models_from_snapshots,
    load_models,
    make_emulator,
)


def snapshot_to_dict(snap: Snapshot) -> dict:
    return {
        "clock_min": snap.clock_min,
        "timestamp": occ_mod.minute_to_iso(snap.clock_min),
        "outdoor_temp_C": round(snap.outdoor_temp_C, 4),
        "chiller_power_W": round(snap.chiller_power_W, 3),
        "total_power_W": round(snap.total_power_W, 3),
        "zones": {
            zid: {
                "temp_C": round(zs.temp_C, 4),
                "setpoint_C": round(zs.setpoint_C, 4),
                "occupied": zs.occupied,
                "state_minutes": round(zs.state_minutes, 1),
            }
            for zid, zs in sorted(snap.zones.items())
        },
        "appliance_powers_W": {
            aid: round(p, 3) for aid, p in sorted(snap.appliance_powers_W.items())
        },
    }


@dataclass
class EventRecord:
    id: int
    event: CurtailmentEvent
    status: str = "scheduled"  # scheduled | running | done | aborted
    report: EventReport | None = None
    baseline_clone: BuildingEmulator | None = None
    next_decision_min: float | None = None


@dataclass
class Session:
    """Single-session state: one building, one emulation, one event at a time."""

    building: Building | None = None
    models: FittedModels | None = None
    emulator: BuildingEmulator | None = None
    criteria: CriteriaConfig = field(default_factory=CriteriaConfig)
    seed: int = 0
    log: list[Snapshot] = field(default_factory=list)
    log_path: Path | None = None  # optional NDJSON persistence of the log
    events: dict[int, EventRecord] = field(default_factory=dict)
    next_event_id: int = 1
    lock: threading.RLock = field(default_factory=threading.RLock)
    runner: "SimulationRunner | None" = None

    def running(self) -> bool:
        return self.runner is not None and self.runner.alive()

    def append_log(self, snap: Snapshot) -> None:
        self.log.append(snap)
        if self.log_path is not None:
            with open(self.log_path, "a") as fh:
                fh.write(json.dumps(snapshot_to_dict(snap)) + "\n")

    def ensure_emulator(self) -> BuildingEmulator:
        if self.emulator is None:
            if self.building is None:
                raise HTTPException(400, "no building configured")
            self.emulator = make_emulator(
                self.building,
                seed=self.seed,
                occupancy_models=self.models.occupancy if self.models else None,
            )
        return self.emulator


class SimulationRunner:
    """Background owner of the emulator: steps, logs, and drives events."""

    def __init__(self, session: Session, dt_seconds: float, speed: float):
        self.session = session
        self.dt_seconds = dt_seconds
        self.speed = speed
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True)

    def start(self):
        self._thread.start()

    def stop(self):
        self._stop.set()
        self._thread.join(timeout=30.0)

    def alive(self) -> bool:
        return self._thread.is_alive() and not self._stop.is_set()

    def _run(self):
        s = self.session
        pace = self.dt_seconds / self.speed if self.speed < 1e5 else 0.0
        while not self._stop.is_set():
            with s.lock:
                emu = s.emulator
                if emu is None:
                    break
                self._drive_events(before_step=True)
                snap = emu.step(self.dt_seconds)
                s.append_log(snap)
                self._drive_events(before_step=False, snap=snap)
            if pace:
                time.sleep(pace)
        with s.lock:
            for rec in s.events.values():
                if rec.status == "running":
                    rec.status = "aborted"
                    if s.emulator is not None:
                        s.emulator.clear_all_commands()

    def _drive_events(self, before_step: bool, snap: Snapshot | None = None):
        s = self.session
        emu = s.emulator
        now = emu.clock_min
        for rec in s.events.values():
            if rec.status == "scheduled" and before_step and now >= rec.event.start_minute - 1e-9:
                rec.status = "running"
                rec.baseline_clone = emu.clone()
                rec.next_decision_min = now
                rec.report = EventReport(
                    event={
                        "start_minute": rec.event.start_minute,
                        "end_minute": rec.event.end_minute,
                        "target_reduction_W": rec.event.target_reduction_W,
                        "weights": list(rec.event.weights.weights) if rec.event.weights else None,
                    },
                    criteria={
                        "criteria": list(s.criteria.criteria),
                        "weights": list(s.criteria.weights),
                        "threshold": s.criteria.threshold,
                    },
                    decision_interval_min=DEFAULT_DECISION_INTERVAL_MIN,
                    dt_seconds=self.dt_seconds,
                )
                rec.report.zone_series = {
                    z.id: {"temp_C": [], "setpoint_C": [], "occupied": [], "comfort": [],
                           "light_W": [], "plug_W": []}
                    for z in s.building.zones()
                }
            if rec.status != "running":
                continue
            if before_step:
                if now >= rec.next_decision_min - 1e-9:
                    if now < rec.event.end_minute - 1e-9:
                        plan = decide(
                            rec.event,
                            natural_view(emu.snapshot(), s.building),
                            s.building,
                            s.models.occupancy,
                            s.models.chiller,
                            s.criteria,
                        )
                        commands: dict[str, float | None] = dict(plan.commands())
                        for aid in emu.active_command_ids():
                            if aid not in commands:
                                commands[aid] = None
                        emu.send_commands(commands)
                        rec.report.decisions.append(
                            {
                                "minute": now,
                                "selected": [selection_dict(x) for x in plan.selected],
                                "estimated_total_W": round(plan.estimated_total_W, 3),
                                "target_unmet": plan.target_unmet,
                            }
                        )
                    rec.next_decision_min += DEFAULT_DECISION_INTERVAL_MIN
            else:
                rec.report.times_min.append(snap.clock_min)
                rec.report.total_power_W.append(round(snap.total_power_W, 3))
                rec.report.chiller_power_W.append(round(snap.chiller_power_W, 3))
                for z in s.building.zones():
                    zs = snap.zones[z.id]
                    series = rec.report.zone_series[z.id]
                    series["temp_C"].append(round(zs.temp_C, 4))
                    series["setpoint_C"].append(round(zs.setpoint_C, 4))
                    series["occupied"].append(int(zs.occupied))
                    series["comfort"].append(round(zone_comfort(s.building, snap, z.id), 4))
                if snap.clock_min >= rec.event.end_minute + DEFAULT_DECISION_INTERVAL_MIN - 1e-9:
                    emu.clear_all_commands()
                    self._finalize(rec)

    def _finalize(self, rec: EventRecord):
        base = rec.baseline_clone
        steps = len(rec.report.times_min)
        for _ in range(steps):
            snap = base.step(self.dt_seconds)
            rec.report.baseline_power_W.append(round(snap.total_power_W, 3))
            rec.report.baseline_chiller_W.append(round(snap.chiller_power_W, 3))
        reductions = rec.report.reduction_series_W()
        in_event = [
            i
            for i, t in enumerate(rec.report.times_min)
            if rec.event.start_minute < t <= rec.event.end_minute
        ]
        sel = [reductions[i] for i in in_event]
        rec.report.summary = {
            "mean_reduction_W": round(sum(sel) / len(sel), 3) if sel else 0.0,
            "steps": steps,
            "decisions": len(rec.report.decisions),
        }
        rec.baseline_clone = None
        rec.status = "done"


def ranking_payload(
    session: Session, horizon_min: float, include_matrix: bool = False
) -> dict:
    if session.building is None:
        raise HTTPException(400, "no building configured")
    if session.models is None:
        raise HTTPException(400, "models not fitted; POST /api/models/fit first")
    emu = session.ensure_emulator()
    snap = emu.snapshot()
    try:
        ranked = score_and_rank(
            snap, session.building, session.models.occupancy, session.models.chiller,
            session.criteria, horizon_min,
        )
    except ControllerError as exc:
        raise HTTPException(400, str(exc)) from exc
    ranking = ranked.ranking
    crit = list(session.criteria.criteria)
    rows = []
    for position, idx in enumerate(ranking.order, start=1):
        alt = ranked.alternatives[idx]
        rat = ranking.rationale[idx]
        rows.append(
            {
                "rank": position,
                "index": idx,
                "appliance_id": alt.appliance_id,
                "zone_id": alt.zone_id,
                "kind": alt.kind.value,
                "setting_index": alt.setting_index,
                "setting_value": alt.setting.value,
                "label": alt.describe(),
                "fitness": round(ranking.fitness[idx], 9),
                "occupied_prob": round(ranked.occupied_prob[alt.zone_id], 9),
                "estimated_reduction_W": round(ranked.reductions_W[idx], 3),
                "expected_scores": {
                    c: round(v, 6) for c, v in zip(crit, rat.expected_scores)
                },
                "mean_win_prob": {
                    c: round(v, 6) for c, v in zip(crit, rat.mean_win_prob)
                },
                "distributions": {
                    c: [[round(v, 6), round(p, 9)] for v, p in support]
                    for c, support in zip(crit, rat.support)
                },
            }
        )
    payload = {
        "computed_at_min": snap.clock_min,
        "horizon_min": horizon_min,
        "criteria": {
            "criteria": crit,
            "weights": list(session.criteria.weights),
            "threshold": session.criteria.threshold,
        },
        "occupied": {z: bool(v) for z, v in sorted(ranked.occupied.items())},
        "alternatives": rows,
    }
    if include_matrix:
        payload["superiority"] = [
            [round(float(x), 9) for x in row] for row in ranking.superiority
        ]
    return payload


def create_app(
    building: Building | None = None,
    models: FittedModels | None = None,
    seed: int = 0,
    ui_dir: str | Path | None = None,
    log_path: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="loadrank service")
    session = Session(
        building=building,
        models=models,
        seed=seed,
        log_path=Path(log_path) if log_path else None,
    )
    app.state.session = session

    @app.exception_handler(ValidationError)
    async def _validation_handler(request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    # -- building -----------------------------------------------------------

    @app.get("/api/building")
    def get_building():
        if session.building is None:
            raise HTTPException(404, "no building configured")
        return building_to_dict(session.building)

    @app.post("/api/building")
    def post_building(doc: dict):
        with session.lock:
            if session.running():
                raise HTTPException(409, "stop the simulation before replacing the building")
            b = building_from_dict(doc)  # ValidationError -> 400
            session.building = b
            session.emulator = None
            session.models = None
            session.log.clear()
            session.events.clear()
        return {"ok": True, "zones": len(b.zones())}

    # -- criteria -----------------------------------------------------------

    @app.get("/api/criteria")
    def get_criteria():
        c = session.criteria
        return {"criteria": list(c.criteria), "weights": list(c.weights), "nu": c.threshold}

    @app.put("/api/criteria")
    def put_criteria(doc: dict):
        weights = doc.get("weights")
        nu = doc.get("nu", session.criteria.threshold)
        labels = doc.get("criteria", list(session.criteria.criteria))
        if weights is None:
            raise HTTPException(400, "body must include 'weights'")
        cfg = CriteriaConfig(
            criteria=tuple(labels), weights=tuple(float(w) for w in weights), threshold=float(nu)
        )
        from .domain import validate_criteria

        validate_criteria(cfg)  # ValidationError -> 400
        with session.lock:
            session.criteria = cfg
        return {"ok": True, "weights": list(cfg.weights), "nu": cfg.threshold}

    # -- models -------------------------------------------------------------

    @app.post("/api/models/fit")
    def post_fit(doc: dict | None = None):
        doc = doc or {}
        with session.lock:
            if session.building is None:
                raise HTTPException(400, "no building configured")
            import tempfile

            try:
                if "path" in doc:
                    from .scenario import fit_models_from_log

                    models = fit_models_from_log(doc["path"], session.building)
                elif "csv" in doc:
                    with tempfile.TemporaryDirectory() as td:
                        p = Path(td) / "upload.csv"
                        p.write_text(doc["csv"])
                        from .scenario import fit_models_from_log

                        models = fit_models_from_log(p, session.building)
                else:
                    if not session.log:
                        raise HTTPException(400, "session log empty; run a simulation or pass a csv")
                    with tempfile.TemporaryDirectory() as td:
                        models = fit_models_from_snapshots(session.log, session.building, td)
            except (ValueError, IdentifiabilityError, occ_mod.TraceError) as exc:
                raise HTTPException(400, f"fit failed: {exc}") from exc
            session.models = models
            if session.emulator is None:
                session.ensure_emulator()
        stats = models.chiller.fit_stats
        return {
            "chiller": {
                "beta0_W": models.chiller.beta0_W,
                "beta_out_W_per_C": models.chiller.beta_out_W_per_C,
                "beta_z_W_per_C": dict(
                    zip(models.chiller.zone_ids, models.chiller.beta_z_W_per_C)
                ),
                "rmse_W": stats.rmse_W if stats else None,
                "frac_within_10pct": stats.frac_within_10pct if stats else None,
            },
            "occupancy_zones": sorted(models.occupancy),
        }

    # -- ranking ------------------------------------------------------------

    @app.get("/api/ranking")
    def get_ranking(
        horizon_min: float = Query(default=DEFAULT_DECISION_INTERVAL_MIN, gt=0),
        include_matrix: bool = False,
    ):
        with session.lock:
            return ranking_payload(session, horizon_min, include_matrix)

    # -- simulation lifecycle -------------------------------------------------

    @app.post("/api/simulation/start")
    def sim_start(doc: dict | None = None):
        doc = doc or {}
        with session.lock:
            if session.running():
                raise HTTPException(409, "simulation already running")
            if session.building is None:
                raise HTTPException(400, "no building configured")
            session.ensure_emulator()
            runner = SimulationRunner(
                session,
                dt_seconds=float(doc.get("dt_seconds", 60.0)),
                speed=float(doc.get("speed", 600.0)),
            )
            session.runner = runner
        runner.start()
        return {"ok": True, "dt_seconds": runner.dt_seconds, "speed": runner.speed}

    @app.post("/api/simulation/stop")
    def sim_stop():
        with session.lock:
            if not session.running():
                raise HTTPException(409, "simulation not running")
            runner = session.runner
        runner.stop()
        with session.lock:
            session.runner = None
        return {"ok": True}

    @app.get("/api/simulation/state")
    def sim_state():
        with session.lock:
            emu = session.ensure_emulator()
            snap = emu.snapshot()
            active = [r.id for r in session.events.values() if r.status == "running"]
            return {
                "running": session.running(),
                "snapshot": snapshot_to_dict(snap),
                "log_length": len(session.log),
                "active_events": active,
            }

    # -- events ---------------------------------------------------------------

    @app.post("/api/events")
    def post_event(doc: dict):
        try:
            weights = doc.get("weights")
            cfg = None
            if weights is not None:
                cfg = CriteriaConfig(
                    criteria=tuple(session.criteria.criteria),
                    weights=tuple(float(w) for w in weights),
                    threshold=float(doc.get("nu", session.criteria.threshold)),
                )
            event = CurtailmentEvent(
                start_minute=float(doc["start_minute"]),
                end_minute=float(doc["end_minute"]),
                target_reduction_W=(
                    None
                    if doc.get("target_reduction_W") in (None, "unlimited")
                    else float(doc["target_reduction_W"])
                ),
                weights=cfg,
            )
        except (KeyError, TypeError, ValueError, ControllerError) as exc:
            raise HTTPException(400, f"invalid event: {exc}") from exc
        with session.lock:
            if session.models is None:
                raise HTTPException(400, "models not fitted")
            for rec in session.events.values():
                if rec.status in ("scheduled", "running") and not (
                    event.end_minute <= rec.event.start_minute
                    or event.start_minute >= rec.event.end_minute
                ):
                    raise HTTPException(409, f"overlaps event {rec.id}")
            rec = EventRecord(id=session.next_event_id, event=event)
            session.next_event_id += 1
            session.events[rec.id] = rec
        return {"id": rec.id, "status": rec.status}

    @app.get("/api/events")
    def list_events():
        with session.lock:
            return [
                {
                    "id": r.id,
                    "status": r.status,
                    "start_minute": r.event.start_minute,
                    "end_minute": r.event.end_minute,
                    "target_reduction_W": r.event.target_reduction_W,
                }
                for r in sorted(session.events.values(), key=lambda r: r.id)
            ]

    @app.get("/api/events/{event_id}/report")
    def event_report(event_id: int):
        with session.lock:
            rec = session.events.get(event_id)
            if rec is None:
                raise HTTPException(404, f"unknown event {event_id}")
            if rec.status == "aborted":
                return {"id": rec.id, "status": "aborted"}
            if rec.status != "done":
                raise HTTPException(409, f"event {event_id} is {rec.status}")
            return {"id": rec.id, "status": "done", "report": report_to_dict(rec.report)}

    # -- time series ----------------------------------------------------------

    @app.get("/api/timeseries")
    def timeseries(
        request: Request,
        from_min: float | None = Query(default=None, alias="from"),
        to_min: float | None = Query(default=None, alias="to"),
        fields: str | None = None,
    ):
        with session.lock:
            if session.building is None:
                raise HTTPException(400, "no building configured")
            rows = [
                s
                for s in session.log
                if (from_min is None or s.clock_min >= from_min)
                and (to_min is None or s.clock_min <= to_min)
            ]
            header = log_header(session.building)
            table = [snapshot_row(s, session.building) for s in rows]
        wanted = None
        if fields:
            wanted = [f.strip() for f in fields.split(",") if f.strip()]
            missing = [f for f in wanted if f not in header]
            if missing:
                raise HTTPException(400, f"unknown fields: {', '.join(missing)}")
            keep = [header.index(f) for f in wanted]
            header = wanted
            table = [[row[i] for i in keep] for row in table]
        if "text/csv" in request.headers.get("accept", ""):
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(header)
            writer.writerows(table)
            return Response(content=buf.getvalue(), media_type="text/csv")
        return {"header": header, "rows": table}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="console")

    return app
