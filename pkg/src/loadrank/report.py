"""Event-report rendering: JSON, delimited time series, and figures.

``write_event_report`` drops three kinds of artifact into the output
directory: the full report as JSON, the power time series as CSV, and PNG
figures (building load vs the no-curtailment baseline, plus a per-zone
detail strip of setpoint/temperature, appliance powers and occupancy).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .controller import EventReport, report_to_dict


def _hours(times_min: list[float]) -> list[float]:
    return [t / 60.0 for t in times_min]


def render_power_figure(report: EventReport, path: Path) -> None:
    """Total building load under curtailment vs the counterfactual baseline."""
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(8, 6), sharex=True, gridspec_kw={"height_ratios": [2, 1]}
    )
    hours = _hours(report.times_min)
    ax1.plot(hours, report.baseline_power_W, label="baseline (no curtailment)", color="tab:gray")
    ax1.plot(hours, report.total_power_W, label="curtailed", color="tab:blue")
    ax1.axvspan(
        report.event["start_minute"] / 60.0,
        report.event["end_minute"] / 60.0,
        alpha=0.08,
        color="tab:orange",
        label="event window",
    )
    ax1.set_ylabel("total power [W]")
    ax1.legend(loc="upper right", fontsize=8)
    ax2.fill_between(hours, report.reduction_series_W(), color="tab:green", alpha=0.6)
    ax2.set_ylabel("reduction [W]")
    ax2.set_xlabel("hour of day")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_zone_figure(report: EventReport, zone_id: str, path: Path) -> None:
    """Per-zone strip chart: setpoint vs temperature, appliance powers, occupancy."""
    series = report.zone_series[zone_id]
    hours = _hours(report.times_min)
    fig, axes = plt.subplots(4, 1, figsize=(8, 8), sharex=True)
    axes[0].plot(hours, series["temp_C"], label="zone temp", color="tab:red")
    axes[0].plot(hours, series["setpoint_C"], label="setpoint", color="tab:blue", drawstyle="steps-post")
    axes[0].set_ylabel("degC")
    axes[0].legend(loc="upper right", fontsize=8)
    axes[0].set_title(f"zone {zone_id}")
    axes[1].plot(hours, series["light_W"], color="tab:olive", drawstyle="steps-post")
    axes[1].set_ylabel("light [W]")
    axes[2].plot(hours, series["plug_W"], color="tab:purple", drawstyle="steps-post")
    axes[2].set_ylabel("plug [W]")
    axes[3].fill_between(hours, series["occupied"], step="post", color="tab:gray", alpha=0.7)
    axes[3].set_ylabel("occupied")
    axes[3].set_yticks([0, 1])
    axes[3].set_xlabel("hour of day")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_series_csv(report: EventReport, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["minute", "total_power_W", "baseline_power_W", "reduction_W", "chiller_power_W"]
        )
        for row in zip(
            report.times_min,
            report.total_power_W,
            report.baseline_power_W,
            report.reduction_series_W(),
            report.chiller_power_W,
        ):
            writer.writerow([row[0], row[1], row[2], round(row[3], 3), row[4]])


def render_chiller_fit_figure(
    observed_W: list[float],
    predicted_W: list[float],
    times_min: list[float],
    path: Path,
    max_points: int = 600,
) -> None:
    """Observed vs estimated chiller power plus the relative-error density."""
    import numpy as np

    observed = np.asarray(observed_W)
    predicted = np.asarray(predicted_W)
    stride = max(1, len(observed) // max_points)
    hours = np.asarray(times_min)[::stride] / 60.0
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6))
    ax1.plot(hours, observed[::stride], label="observed", color="tab:gray", lw=1)
    ax1.plot(hours, predicted[::stride], label="estimated", color="tab:blue", lw=1)
    ax1.set_ylabel("chiller power [W]")
    ax1.set_xlabel("hour")
    ax1.legend(fontsize=8)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(observed != 0, (observed - predicted) / observed, np.nan)
    rel = rel[np.isfinite(rel)]
    ax2.hist(rel * 100, bins=60, density=True, color="tab:blue", alpha=0.7)
    ax2.set_xlabel("relative estimation error [%]")
    ax2.set_ylabel("density")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_occupancy_fit_figure(
    daily_patterns: dict[str, tuple[list[float], list[float]]],
    window_minutes: int,
    path: Path,
) -> None:
    """Observed vs model daily occupied-likelihood per zone (one panel each)."""
    zones = list(daily_patterns)
    fig, axes = plt.subplots(len(zones), 1, figsize=(8, 2.2 * len(zones)), sharex=True, squeeze=False)
    hours = None
    for ax, zone in zip(axes[:, 0], zones):
        observed, modeled = daily_patterns[zone]
        hours = [w * window_minutes / 60.0 for w in range(len(observed))]
        ax.plot(hours, observed, label="observed", color="tab:gray")
        ax.plot(hours, modeled, label="model", color="tab:green")
        ax.set_ylabel(f"{zone}\nP(occupied)", fontsize=8)
        ax.set_ylim(-0.05, 1.05)
    axes[0, 0].legend(fontsize=8)
    axes[-1, 0].set_xlabel("hour of day")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_event_report(
    report: EventReport,
    outdir: str | Path,
    detail_zone: str | None = None,
    figures: bool = True,
) -> dict[str, Path]:
    """Persist the report bundle; returns the paths written, keyed by artifact."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    paths["report_json"] = outdir / "event_report.json"
    paths["report_json"].write_text(json.dumps(report_to_dict(report), indent=2) + "\n")

    if report.times_min:
        paths["series_csv"] = outdir / "power_series.csv"
        write_series_csv(report, paths["series_csv"])
        if figures:
            paths["power_png"] = outdir / "power_vs_baseline.png"
            render_power_figure(report, paths["power_png"])
            zone = detail_zone or next(iter(report.zone_series))
            paths["zone_png"] = outdir / f"zone_{zone}.png"
            render_zone_figure(report, zone, paths["zone_png"])
    return paths
