"""Command-line entry points.

Subcommands cover the full workflow: generate training data from the
emulator, fit the occupancy and chiller models, produce a one-shot ranking,
run a closed-loop curtailment event (report JSON + CSV + figures), and serve
the HTTP API.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .controller import CurtailmentEvent, run_event
from .domain import (
    CriteriaConfig,
    default_building,
    load_building,
    save_building,
    validate_criteria,
)
from .emulator import write_snapshot_log
from .report import write_event_report
from .scenario import (
    fit_models_from_log,
    generate_history,
    load_models,
    make_emulator,
    save_models,
)
from .service import ranking_payload


def _parse_hhmm(text: str) -> float:
    if ":" in text:
        h, m = text.split(":", 1)
        return float(h) * 60 + float(m)
    return float(text)


def _parse_weights(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _load_config(args) -> "Building":
    if args.config:
        return load_building(args.config)
    return default_building()


def _criteria(args) -> CriteriaConfig:
    cfg = CriteriaConfig()
    if args.weights:
        cfg = CriteriaConfig(weights=_parse_weights(args.weights), threshold=args.nu)
    elif args.nu != cfg.threshold:
        cfg = CriteriaConfig(threshold=args.nu)
    validate_criteria(cfg)
    return cfg


def cmd_generate_data(args) -> int:
    building = _load_config(args)
    if args.days <= 0:
        raise SystemExit("--days must be >= 1")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    emulator = make_emulator(building, seed=args.seed)
    snapshots = generate_history(
        emulator,
        days=args.days,
        dt_seconds=args.dt_seconds,
        excitation_seed=None if args.no_excitation else args.seed + 1000,
    )
    log_path = outdir / "building_log.csv"
    write_snapshot_log(snapshots, building, log_path)
    save_building(building, outdir / "building.json")
    print(f"wrote {len(snapshots)} rows to {log_path}")
    return 0


def cmd_fit(args) -> int:
    building = _load_config(args)
    models = fit_models_from_log(args.data, building)
    paths = save_models(models, args.out)
    stats = models.chiller.fit_stats
    print(f"chiller rmse {stats.rmse_W:.1f} W, {stats.frac_within_10pct * 100:.1f}% of errors within 10%")
    if args.figures:
        _write_fit_figures(args, building, models)
    print(f"wrote {len(paths)} model files to {args.out}")
    return 0


def _write_fit_figures(args, building, models) -> None:
    from pathlib import Path as _P

    from .chiller import observations_from_csv, predict_power
    from .emulator import occupancy_traces_from_log
    from .occupancy import simulate, window_occupied_frequency
    from .report import render_chiller_fit_figure, render_occupancy_fit_figure

    outdir = _P(args.out)
    zone_ids = tuple(z.id for z in building.zones())
    obs, _ = observations_from_csv(args.data, zone_ids)
    render_chiller_fit_figure(
        [o.chiller_power_W for o in obs],
        [predict_power(models.chiller, o.outdoor_temp_C, o.setpoints_C) for o in obs],
        [o.timestamp_min for o in obs],
        outdir / "chiller_fit.png",
    )
    traces = occupancy_traces_from_log(args.data, list(zone_ids))
    patterns = {}
    for zid in zone_ids[:3]:  # a few panels are enough to judge the fit
        model = models.occupancy[zid]
        observed = window_occupied_frequency(traces[zid], model.window_minutes)
        resim = simulate(model, seed=1, days=60)
        modeled = window_occupied_frequency(resim, model.window_minutes)
        patterns[zid] = (observed.tolist(), modeled.tolist())
    render_occupancy_fit_figure(
        patterns, models.occupancy[zone_ids[0]].window_minutes, outdir / "occupancy_fit.png"
    )
    print(f"wrote fit figures to {outdir}")


def cmd_rank(args) -> int:
    building = _load_config(args)
    models = load_models(building, args.models)
    emulator = make_emulator(
        building, seed=args.seed, occupancy_models=models.occupancy
    )
    while emulator.clock_min < _parse_hhmm(args.at) - 1e-9:
        emulator.step(300.0)

    from .service import Session

    session = Session(building=building, models=models, seed=args.seed)
    session.emulator = emulator
    session.criteria = _criteria(args)
    payload = ranking_payload(session, horizon_min=args.horizon_min)
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote ranking to {args.out}")
    else:
        print(text)
    return 0


def cmd_run_event(args) -> int:
    building = _load_config(args)
    models = load_models(building, args.models)
    emulator = make_emulator(building, seed=args.seed)
    target = None if args.target in ("unlimited", "none") else float(args.target)
    event = CurtailmentEvent(
        start_minute=_parse_hhmm(args.start),
        end_minute=_parse_hhmm(args.end),
        target_reduction_W=target,
    )
    config = _criteria(args)
    report = run_event(event, emulator, models.occupancy, models.chiller, config)
    paths = write_event_report(
        report, args.out, detail_zone=args.detail_zone, figures=not args.no_figures
    )
    print(f"mean reduction {report.summary.get('mean_reduction_W', 0.0):.1f} W")
    for kind, p in paths.items():
        print(f"  {kind}: {p}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    building = _load_config(args)
    models = load_models(building, args.models) if args.models else None
    app = create_app(
        building=building,
        models=models,
        seed=args.seed,
        ui_dir=args.ui,
        log_path=args.log,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loadrank",
        description="Occupancy-aware ranking and curtailment of building loads",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, models=False):
        p.add_argument("--config", help="building JSON (default: stock 3x5-zone office)")
        p.add_argument("--seed", type=int, default=0)
        if models:
            p.add_argument("--models", required=True, help="directory of fitted model JSONs")
        p.add_argument("--weights", help="comma-separated criteria weights, e.g. 0.6,0.4")
        p.add_argument("--nu", type=float, default=0.75, help="classification threshold")

    p = sub.add_parser("generate-data", help="run the emulator to produce a training log")
    common(p)
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dt-seconds", type=float, default=300.0)
    p.add_argument("--no-excitation", action="store_true", help="skip setpoint excitation")
    p.set_defaults(func=cmd_generate_data)

    p = sub.add_parser("fit", help="fit occupancy + chiller models from a log CSV")
    common(p)
    p.add_argument("--data", required=True, help="snapshot log CSV")
    p.add_argument("--out", required=True, help="output model directory")
    p.add_argument("--figures", action="store_true", help="render fit-quality figures")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rank", help="one-shot ranking of all alternatives")
    common(p, models=True)
    p.add_argument("--at", default="10:00", help="simulated time of day HH:MM")
    p.add_argument("--horizon-min", type=float, default=5.0)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("run-event", help="headless closed-loop curtailment event")
    common(p, models=True)
    p.add_argument("--start", default="8:00")
    p.add_argument("--end", default="16:00")
    p.add_argument("--target", default="unlimited", help="watts, or 'unlimited'")
    p.add_argument("--out", required=True, help="report output directory")
    p.add_argument("--detail-zone", help="zone id for the detail figure")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_run_event)

    p = sub.add_parser("serve", help="start the HTTP service")
    common(p)
    p.add_argument("--models", help="directory of fitted model JSONs")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="static console directory to serve at /")
    p.add_argument("--log", help="append the measurement log to this NDJSON file")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
