/**
 * Event operations panel: set the window and target, fire the event, watch
 * the achieved-vs-baseline overlay once the report lands, download it.
 */

import type { EventInfo, EventReportDoc } from "../api.js";
import { lineChart } from "../charts.js";
import { fmtMinuteClock, fmtWatts } from "../format.js";

export function eventFormHtml(): string {
  return `<form id="event-form" class="event-form">
    <label>start <input name="start" type="time" value="08:00"></label>
    <label>end <input name="end" type="time" value="16:00"></label>
    <label>target
      <input name="target" type="number" min="0" step="100" placeholder="unlimited">
      W (empty = unlimited)
    </label>
    <button type="submit">schedule event</button>
    <span id="event-errors" class="inline-errors"></span>
  </form>
  <ul id="event-list" class="event-list"></ul>
  <div id="event-report"></div>`;
}

export function parseClock(text: string): number {
  const [h, m] = text.split(":").map(Number);
  return h * 60 + (m || 0);
}

export function eventListHtml(events: EventInfo[]): string {
  if (!events.length) return `<li class="empty-state">no events scheduled</li>`;
  return events
    .map((e) => {
      const target = e.target_reduction_W == null ? "unlimited" : fmtWatts(e.target_reduction_W);
      return `<li class="event event-${e.status}" data-event="${e.id}">
        #${e.id} ${fmtMinuteClock(e.start_minute)}-${fmtMinuteClock(e.end_minute)}
        target ${target}
        <span class="event-status">${e.status}</span>
        ${e.status === "done" ? `<button type="button" class="show-report" data-event="${e.id}">report</button>` : ""}
      </li>`;
    })
    .join("");
}

export function eventReportHtml(report: EventReportDoc): string {
  const s = report.series;
  const hours = s.times_min.map((t) => t / 60);
  const chart = lineChart(
    hours,
    [
      { label: "baseline", values: s.baseline_power_W, color: "#999" },
      { label: "curtailed", values: s.total_power_W, color: "#1f5fa8" },
    ],
    {
      height: 200,
      xTicks: hours.length
        ? [0, 0.25, 0.5, 0.75, 1].map((f) => {
            const t = s.times_min[Math.floor(f * (s.times_min.length - 1))];
            return { at: t / 60, label: fmtMinuteClock(t) };
          })
        : [],
    },
  );
  const mean = report.summary["mean_reduction_W"];
  const restored =
    report.restored_after_min == null
      ? "restore not confirmed"
      : `restored ${report.restored_after_min} min after the event`;
  return `<div class="report">
    <p>mean reduction <b>${fmtWatts(Number(mean))}</b>; ${restored}</p>
    ${chart}
    <button type="button" id="download-report">download JSON</button>
  </div>`;
}

export function reportBlob(report: EventReportDoc): Blob {
  return new Blob([JSON.stringify(report, null, 2)], { type: "application/json" });
}
