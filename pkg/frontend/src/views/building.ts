/**
 * Building configuration editor: review the floor/zone/appliance tree, edit
 * zone comfort parameters, add or remove appliances. Client-side checks
 * mirror the server schema so most mistakes surface before the POST; server
 * 400s are shown inline, and a 409 (simulation running) prompts to stop it.
 */

import type { ApplianceDoc, BuildingDoc, ZoneDoc } from "../api.js";
import { escapeHtml } from "../format.js";

export function validateBuildingDoc(doc: BuildingDoc): string[] {
  const problems: string[] = [];
  if (!doc.floors.length) problems.push("building needs at least one floor");
  const zoneIds = new Set<string>();
  for (const floor of doc.floors) {
    if (!floor.zones.length) problems.push(`floor ${floor.id} has no zones`);
    for (const zone of floor.zones) {
      if (zoneIds.has(zone.id)) problems.push(`duplicate zone id ${zone.id}`);
      zoneIds.add(zone.id);
      if (!(zone.comfort_alpha > 1)) problems.push(`zone ${zone.id}: comfort_alpha must be > 1`);
      if (!(zone.comfort_delta_C > 0)) problems.push(`zone ${zone.id}: comfort_delta_C must be > 0`);
      for (const appliance of zone.appliances) {
        if (!(appliance.rated_power_W > 0))
          problems.push(`appliance ${appliance.id}: rated power must be > 0`);
        if (appliance.settings.filter((s) => s.baseline).length !== 1)
          problems.push(`appliance ${appliance.id}: exactly one baseline setting required`);
      }
    }
  }
  return problems;
}

export const APPLIANCE_PRESETS: Record<string, (id: string) => ApplianceDoc> = {
  light: (id) => ({
    id,
    kind: "DimmableLight",
    rated_power_W: 200,
    settings: [0, 0.2, 0.4, 0.6, 0.8, 1].map((v) => ({ value: v, baseline: v === 1 })),
  }),
  pc: (id) => ({
    id,
    kind: "PlugLoad",
    rated_power_W: 150,
    settings: [
      { value: 1, baseline: true },
      { value: 0 },
    ],
  }),
  hvac: (id) => ({
    id,
    kind: "HvacSetpoint",
    rated_power_W: 1,
    settings: Array.from({ length: 11 }, (_, i) => ({
      value: i - 5,
      baseline: i === 5,
    })),
  }),
};

export function addAppliance(zone: ZoneDoc, preset: keyof typeof APPLIANCE_PRESETS): ZoneDoc {
  let n = 1;
  let id = `${zone.id}-${preset}${n}`;
  const ids = new Set(zone.appliances.map((a) => a.id));
  while (ids.has(id)) {
    n += 1;
    id = `${zone.id}-${preset}${n}`;
  }
  return { ...zone, appliances: [...zone.appliances, APPLIANCE_PRESETS[preset](id)] };
}

export function removeAppliance(zone: ZoneDoc, applianceId: string): ZoneDoc {
  return { ...zone, appliances: zone.appliances.filter((a) => a.id !== applianceId) };
}

function applianceRow(a: ApplianceDoc): string {
  const detail =
    a.kind === "HvacSetpoint"
      ? `${a.settings.length} offsets`
      : `${a.settings.length} levels, ${a.rated_power_W} W`;
  return `<li class="appliance">
    <span class="appliance-kind">${escapeHtml(a.kind)}</span>
    <span class="appliance-id">${escapeHtml(a.id)}</span>
    <span class="appliance-detail">${detail}</span>
    <button type="button" class="remove-appliance" data-appliance="${escapeHtml(a.id)}">remove</button>
  </li>`;
}

export function buildingTreeHtml(doc: BuildingDoc): string {
  const floors = doc.floors
    .map(
      (f) => `<details open class="floor"><summary>floor ${escapeHtml(f.id)}</summary>
      ${f.zones
        .map(
          (z) => `<details class="zone" data-zone="${escapeHtml(z.id)}">
          <summary>zone ${escapeHtml(z.id)}</summary>
          <label>desired temp degC
            <input type="number" step="0.5" value="${z.desired_temp_C}" data-zone-field="desired_temp_C" data-zone="${escapeHtml(z.id)}">
          </label>
          <label>comfort alpha
            <input type="number" step="0.5" value="${z.comfort_alpha}" data-zone-field="comfort_alpha" data-zone="${escapeHtml(z.id)}">
          </label>
          <label>comfort delta degC
            <input type="number" step="0.5" value="${z.comfort_delta_C}" data-zone-field="comfort_delta_C" data-zone="${escapeHtml(z.id)}">
          </label>
          <ul class="appliances">${z.appliances.map(applianceRow).join("")}</ul>
          <span class="add-appliance" data-zone="${escapeHtml(z.id)}">
            add:
            <button type="button" data-preset="light">light</button>
            <button type="button" data-preset="pc">PC</button>
            <button type="button" data-preset="hvac">HVAC knob</button>
          </span>
        </details>`,
        )
        .join("")}
    </details>`,
    )
    .join("");
  return `<div class="building-tree">${floors}
    <div class="editor-actions">
      <button type="button" id="building-submit">save building</button>
      <span id="building-errors" class="inline-errors"></span>
    </div>
  </div>`;
}
