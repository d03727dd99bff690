/**
 * Live charts fed by polling: total power trail plus a per-zone
 * temperature/occupancy strip from the rolling window of snapshots.
 */

import type { SimSnapshot } from "../api.js";
import { lineChart } from "../charts.js";
import { escapeHtml, fmtMinuteClock, fmtWatts } from "../format.js";

export const WINDOW_MINUTES = 8 * 60;

export class SnapshotTrail {
  private snaps: SimSnapshot[] = [];

  push(snap: SimSnapshot): void {
    const last = this.snaps[this.snaps.length - 1];
    if (last && snap.clock_min <= last.clock_min) return; // poll repeat
    this.snaps.push(snap);
    const cutoff = snap.clock_min - WINDOW_MINUTES;
    while (this.snaps.length && this.snaps[0].clock_min < cutoff) {
      this.snaps.shift();
    }
  }

  times(): number[] {
    return this.snaps.map((s) => s.clock_min);
  }

  totals(): number[] {
    return this.snaps.map((s) => s.total_power_W);
  }

  zoneTemps(zoneId: string): number[] {
    return this.snaps.map((s) => s.zones[zoneId]?.temp_C ?? NaN);
  }

  zoneOccupied(zoneId: string): number[] {
    return this.snaps.map((s) => (s.zones[zoneId]?.occupied ? 1 : 0));
  }

  latest(): SimSnapshot | undefined {
    return this.snaps[this.snaps.length - 1];
  }
}

export function liveHtml(trail: SnapshotTrail, zoneId: string | null): string {
  const latest = trail.latest();
  if (!latest) return `<p class="empty-state">simulation not started</p>`;
  const xs = trail.times().map((t) => t / 60);
  const ticks = xs.length
    ? [0, 0.5, 1].map((f) => {
        const t = trail.times()[Math.floor(f * (trail.times().length - 1))];
        return { at: t / 60, label: fmtMinuteClock(t) };
      })
    : [];
  const power = lineChart(
    xs,
    [{ label: "total power", values: trail.totals(), color: "#1f5fa8" }],
    { height: 160, xTicks: ticks },
  );
  let zoneStrip = "";
  if (zoneId && latest.zones[zoneId]) {
    zoneStrip = lineChart(
      xs,
      [
        { label: `${zoneId} temp degC`, values: trail.zoneTemps(zoneId), color: "#b33" },
        {
          label: "occupied",
          values: trail.zoneOccupied(zoneId).map((v) => v * 10 + 10),
          color: "#888",
          step: true,
        },
      ],
      { height: 140, xTicks: ticks },
    );
  }
  const zoneOptions = Object.keys(latest.zones)
    .map((z) => `<option value="${escapeHtml(z)}"${z === zoneId ? " selected" : ""}>${escapeHtml(z)}</option>`)
    .join("");
  return `<p class="live-status">
      ${fmtMinuteClock(latest.clock_min)} - outdoor ${latest.outdoor_temp_C.toFixed(1)} degC -
      total <b>${fmtWatts(latest.total_power_W)}</b> (chiller ${fmtWatts(latest.chiller_power_W)})
    </p>
    ${power}
    <label>zone detail <select id="live-zone">${zoneOptions}</select></label>
    ${zoneStrip}`;
}
