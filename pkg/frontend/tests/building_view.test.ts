import { describe, expect, it } from "vitest";

import type { BuildingDoc, ZoneDoc } from "../src/api.js";
import { addAppliance, buildingTreeHtml, removeAppliance, validateBuildingDoc } from "../src/views/building.js";

function zone(id = "Z1"): ZoneDoc {
  return {
    id,
    desired_temp_C: 22,
    comfort_alpha: 10,
    comfort_delta_C: 3,
    appliances: [],
  };
}

function doc(zones: ZoneDoc[] = [zone()]): BuildingDoc {
  return { id: "b", floor_area_m2: 100, floors: [{ id: "F1", zones }] };
}

describe("client-side validation", () => {
  it("accepts a sane document", () => {
    expect(validateBuildingDoc(doc())).toEqual([]);
  });

  it("rejects non-positive comfort delta", () => {
    const bad = doc([{ ...zone(), comfort_delta_C: 0 }]);
    expect(validateBuildingDoc(bad).join(" ")).toMatch(/comfort_delta_C/);
  });

  it("rejects duplicate zone ids and empty floors", () => {
    expect(validateBuildingDoc(doc([zone("A"), zone("A")])).join(" ")).toMatch(/duplicate/);
    expect(validateBuildingDoc(doc([])).join(" ")).toMatch(/no zones/);
  });

  it("requires exactly one baseline setting per appliance", () => {
    const z = addAppliance(zone(), "pc");
    z.appliances[0].settings.forEach((s) => (s.baseline = false));
    expect(validateBuildingDoc(doc([z])).join(" ")).toMatch(/baseline/);
  });
});

describe("appliance editing", () => {
  it("adds presets with unique ids", () => {
    let z = addAppliance(zone(), "pc");
    z = addAppliance(z, "pc");
    expect(z.appliances.map((a) => a.id)).toEqual(["Z1-pc1", "Z1-pc2"]);
    expect(z.appliances[0].kind).toBe("PlugLoad");
  });

  it("removes by id", () => {
    let z = addAppliance(zone(), "light");
    z = removeAppliance(z, "Z1-light1");
    expect(z.appliances).toEqual([]);
  });

  it("light preset uses the 20% dimming grid", () => {
    const z = addAppliance(zone(), "light");
    expect(z.appliances[0].settings.map((s) => s.value)).toEqual([0, 0.2, 0.4, 0.6, 0.8, 1]);
  });
});

describe("tree rendering", () => {
  it("renders every zone with editable comfort fields", () => {
    const html = buildingTreeHtml(doc([zone("Z1"), zone("Z2")]));
    expect(html).toContain('data-zone="Z1"');
    expect(html).toContain('data-zone="Z2"');
    expect(html).toContain('data-zone-field="comfort_delta_C"');
  });
});
