/**
 * Console wiring: panels, polling loop, and the API round trips.
 */

import { ApiClient, ApiError, BuildingDoc, RankingPayload } from "./api.js";
import { ConsoleStore } from "./state.js";
import {
  addAppliance,
  buildingTreeHtml,
  removeAppliance,
  validateBuildingDoc,
} from "./views/building.js";
import {
  eventFormHtml,
  eventListHtml,
  eventReportHtml,
  parseClock,
  reportBlob,
} from "./views/events.js";
import { SnapshotTrail, liveHtml } from "./views/live.js";
import { hydrateRankingTable, rankingTableHtml } from "./views/ranking.js";

const api = new ApiClient();
const store = new ConsoleStore();
const trail = new SnapshotTrail();

let building: BuildingDoc | null = null;
let lastRanking: RankingPayload | null = null;
let liveZone: string | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showError(id: string, err: unknown): void {
  el(id).textContent = err instanceof Error ? err.message : String(err);
}

// -- building editor ---------------------------------------------------------

function renderBuilding(): void {
  if (!building) return;
  const host = el("building-panel");
  host.innerHTML = buildingTreeHtml(building);

  host.querySelectorAll<HTMLInputElement>("input[data-zone-field]").forEach((input) => {
    input.addEventListener("change", () => {
      const zone = building!.floors
        .flatMap((f) => f.zones)
        .find((z) => z.id === input.dataset.zone);
      if (zone) {
        (zone as unknown as Record<string, number>)[input.dataset.zoneField!] = Number(input.value);
      }
    });
  });
  host.querySelectorAll<HTMLButtonElement>(".remove-appliance").forEach((btn) => {
    btn.addEventListener("click", () => {
      mutateZoneOf(btn.closest(".zone")!, (zone) => removeAppliance(zone, btn.dataset.appliance!));
    });
  });
  host.querySelectorAll<HTMLSpanElement>(".add-appliance button").forEach((btn) => {
    btn.addEventListener("click", () => {
      const preset = btn.dataset.preset as "light" | "pc" | "hvac";
      mutateZoneOf(btn.closest(".zone")!, (zone) => addAppliance(zone, preset));
    });
  });
  el<HTMLButtonElement>("building-submit").addEventListener("click", submitBuilding);
}

function mutateZoneOf(zoneEl: Element, fn: (zone: BuildingDoc["floors"][0]["zones"][0]) => BuildingDoc["floors"][0]["zones"][0]): void {
  const zoneId = (zoneEl as HTMLElement).dataset.zone;
  building = {
    ...building!,
    floors: building!.floors.map((f) => ({
      ...f,
      zones: f.zones.map((z) => (z.id === zoneId ? fn(z) : z)),
    })),
  };
  renderBuilding();
}

async function submitBuilding(): Promise<void> {
  if (!building) return;
  const problems = validateBuildingDoc(building);
  if (problems.length) {
    el("building-errors").textContent = problems.join("; ");
    return;
  }
  try {
    await api.putBuilding(building);
    el("building-errors").textContent = "saved";
    await refreshRanking();
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      el("building-errors").textContent =
        "simulation is running - stop it before editing the building";
    } else {
      showError("building-errors", err);
    }
  }
}

// -- criteria sliders ---------------------------------------------------------

function renderSliders(): void {
  const host = el("criteria-panel");
  const rows = store.sliders.labels
    .map(
      (label, i) => `<label class="slider-row">${label}
        <input type="range" min="0" max="1" step="0.05" value="${store.sliders.raw[i]}" data-slider="${i}">
        <span data-slider-value="${i}">${store.sliders.raw[i].toFixed(2)}</span>
      </label>`,
    )
    .join("");
  host.innerHTML = `${rows}
    <label class="slider-row">threshold
      <input type="number" min="0.51" max="0.99" step="0.01" value="${store.sliders.nu}" id="nu-input">
    </label>
    <button type="button" id="apply-criteria">apply weights</button>
    <span id="criteria-errors" class="inline-errors"></span>`;

  host.querySelectorAll<HTMLInputElement>("input[data-slider]").forEach((input) => {
    input.addEventListener("input", () => {
      const i = Number(input.dataset.slider);
      store.setSlider(i, Number(input.value));
      host.querySelector(`[data-slider-value="${i}"]`)!.textContent = Number(input.value).toFixed(2);
      renderRankingPanel(); // stale flag may flip
    });
  });
  el<HTMLInputElement>("nu-input").addEventListener("change", (ev) => {
    store.sliders.nu = Number((ev.target as HTMLInputElement).value);
  });
  el<HTMLButtonElement>("apply-criteria").addEventListener("click", async () => {
    try {
      await api.putCriteria(store.submissionWeights(), store.sliders.nu);
      el("criteria-errors").textContent = "";
      await refreshRanking();
    } catch (err) {
      showError("criteria-errors", err);
    }
  });
}

// -- ranking ------------------------------------------------------------------

async function refreshRanking(): Promise<void> {
  try {
    lastRanking = await api.getRanking();
    store.rankingReceived(lastRanking.criteria.weights);
    renderRankingPanel();
    el("ranking-errors").textContent = "";
  } catch (err) {
    showError("ranking-errors", err);
  }
}

function renderRankingPanel(): void {
  const host = el("ranking-panel");
  if (!lastRanking) {
    host.innerHTML = `<p class="empty-state">no ranking yet - fit models and refresh</p>`;
    return;
  }
  host.innerHTML = rankingTableHtml(lastRanking, store.rankingStale());
  hydrateRankingTable(host, lastRanking);
}

// -- events ---------------------------------------------------------------

function renderEventPanel(): void {
  el("event-panel").innerHTML = eventFormHtml();
  el<HTMLFormElement>("event-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const data = new FormData(form);
    const targetRaw = String(data.get("target") ?? "").trim();
    try {
      await api.postEvent({
        start_minute: parseClock(String(data.get("start"))),
        end_minute: parseClock(String(data.get("end"))),
        target_reduction_W: targetRaw === "" ? "unlimited" : Number(targetRaw),
      });
      el("event-errors").textContent = "";
      await refreshEvents();
    } catch (err) {
      showError("event-errors", err);
    }
  });
}

async function refreshEvents(): Promise<void> {
  const events = await api.listEvents();
  const list = el("event-list");
  list.innerHTML = eventListHtml(events);
  list.querySelectorAll<HTMLButtonElement>(".show-report").forEach((btn) => {
    btn.addEventListener("click", async () => {
      const result = await api.getEventReport(Number(btn.dataset.event));
      if (result.report) {
        el("event-report").innerHTML = eventReportHtml(result.report);
        el<HTMLButtonElement>("download-report").addEventListener("click", () => {
          const url = URL.createObjectURL(reportBlob(result.report!));
          const a = document.createElement("a");
          a.href = url;
          a.download = `event_${result.id}_report.json`;
          a.click();
          URL.revokeObjectURL(url);
        });
      }
    });
  });
}

// -- simulation / live view -----------------------------------------------

async function pollLive(): Promise<void> {
  try {
    const state = await api.getSimState();
    trail.push(state.snapshot);
    if (liveZone === null) {
      liveZone = Object.keys(state.snapshot.zones)[0] ?? null;
    }
    const host = el("live-panel");
    host.innerHTML = liveHtml(trail, liveZone);
    const select = document.getElementById("live-zone") as HTMLSelectElement | null;
    select?.addEventListener("change", () => {
      liveZone = select.value;
    });
    el("sim-toggle").textContent = state.running ? "stop simulation" : "start simulation";
    if (state.active_events.length || Math.random() < 0.2) {
      await refreshEvents();
    }
  } catch {
    /* service briefly unavailable between polls */
  }
}

function wireSimToggle(): void {
  el<HTMLButtonElement>("sim-toggle").addEventListener("click", async () => {
    try {
      const state = await api.getSimState();
      if (state.running) {
        await api.stopSimulation();
      } else {
        await api.startSimulation();
      }
    } catch (err) {
      showError("sim-errors", err);
    }
  });
  el<HTMLButtonElement>("fit-models").addEventListener("click", async () => {
    el("sim-errors").textContent = "fitting...";
    try {
      await api.fitModels();
      el("sim-errors").textContent = "models fitted";
      await refreshRanking();
    } catch (err) {
      showError("sim-errors", err);
    }
  });
  el<HTMLButtonElement>("ranking-refresh").addEventListener("click", refreshRanking);
}

async function boot(): Promise<void> {
  renderSliders();
  renderEventPanel();
  wireSimToggle();
  try {
    building = await api.getBuilding();
    renderBuilding();
  } catch (err) {
    showError("building-errors-top", err);
  }
  try {
    const criteria = await api.getCriteria();
    store.sliders = { labels: criteria.criteria, raw: [...criteria.weights], nu: criteria.nu };
    renderSliders();
  } catch {
    /* defaults stand */
  }
  await refreshRanking().catch(() => undefined);
  await pollLive();
  setInterval(pollLive, 2000);
}

if (typeof document !== "undefined" && document.getElementById("console-root")) {
  void boot();
}
