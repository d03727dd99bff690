/**
 * The display layer must be a pure projection of the ranking payload:
 * every number on screen is a formatted copy of a payload field, never a
 * recomputation.
 */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { fmtFitness, fmtProb } from "../src/format.js";
import { ConsoleStore } from "../src/state.js";
import { buildTableRows, rankingTableHtml, rationaleHtml } from "../src/views/ranking.js";
import { FakeServer, cannedRow } from "./fake_server.js";

describe("ranking table projection", () => {
  it("copies fitness and occupancy probability verbatim from the payload", () => {
    const server = new FakeServer();
    server.rows = [
      cannedRow({ index: 0, fitness: 0.83214, occupied_prob: 0.10734 }),
      cannedRow({
        index: 1,
        appliance_id: "Z1-light",
        label: "Z1/Z1-light: light 60%",
        fitness: 0.41007,
        occupied_prob: 0.10734,
      }),
    ];
    const payload = server.rankingPayload();
    const rows = buildTableRows(payload);
    for (let i = 0; i < rows.length; i++) {
      expect(rows[i].fitness).toBe(fmtFitness(payload.alternatives[i].fitness));
      expect(rows[i].occupiedProb).toBe(fmtProb(payload.alternatives[i].occupied_prob));
      expect(rows[i].rank).toBe(String(payload.alternatives[i].rank));
    }
  });

  it("keeps the server's order: table sorted by displayed fitness", () => {
    const server = new FakeServer();
    server.rows = [
      cannedRow({ index: 2, fitness: 0.9 }),
      cannedRow({ index: 5, fitness: 0.7 }),
      cannedRow({ index: 1, fitness: 0.1 }),
    ];
    const rows = buildTableRows(server.rankingPayload());
    const fits = rows.map((r) => Number(r.fitness));
    expect(fits).toEqual([...fits].sort((a, b) => b - a));
  });

  it("shows an empty state for a building with nothing to rank", () => {
    const server = new FakeServer();
    server.rows = [];
    const html = rankingTableHtml(server.rankingPayload(), false);
    expect(html).toContain("empty-state");
    expect(html).not.toContain("<table");
  });

  it("flags staleness without dropping the table", () => {
    const server = new FakeServer();
    const html = rankingTableHtml(server.rankingPayload(), true);
    expect(html).toContain('data-field="stale"');
    expect(html).toContain("<table");
  });
});

describe("rationale view", () => {
  it("displays the occupancy probability exactly as served", () => {
    const row = cannedRow({ occupied_prob: 0.10734 });
    const html = rationaleHtml(row, ["comfort", "curtailment"]);
    expect(html).toContain(`data-field="occupied_prob">${fmtProb(0.10734)}<`);
  });

  it("lists every score atom of the comfort mixture", () => {
    const row = cannedRow();
    const html = rationaleHtml(row, ["comfort", "curtailment"]);
    for (const [value, prob] of row.distributions.comfort) {
      expect(html).toContain(value.toFixed(4));
      expect(html).toContain(prob.toFixed(3));
    }
  });
});

describe("console round trip (weights -> server -> table)", () => {
  it("reproduces the server ranking exactly after a slider edit", async () => {
    const server = new FakeServer();
    const client = new ApiClient("", server.fetch);
    const store = new ConsoleStore();

    // operator drags sliders to 0.9 / 0.1 and applies
    store.setSlider(0, 0.9);
    store.setSlider(1, 0.1);
    const submitted = store.submissionWeights();
    await client.putCriteria(submitted, store.sliders.nu);

    // refresh: the server echoes exactly what the sliders submitted and the
    // displayed table equals the fresh payload field-for-field
    const payload = await client.getRanking();
    store.rankingReceived(payload.criteria.weights);
    expect(payload.criteria.weights).toEqual(submitted);
    expect(payload.criteria.weights[0]).toBeCloseTo(0.9, 12);
    expect(payload.criteria.weights.reduce((a, b) => a + b, 0)).toBe(1);
    expect(store.rankingStale()).toBe(false);

    const rows = buildTableRows(payload);
    expect(rows.map((r) => r.fitness)).toEqual(
      payload.alternatives.map((a) => fmtFitness(a.fitness)),
    );
    expect(rows.map((r) => r.occupiedProb)).toEqual(
      payload.alternatives.map((a) => fmtProb(a.occupied_prob)),
    );
    // and the rationale for a selected alternative carries the same
    // occupancy probability the server used for the comfort mixture
    const html = rationaleHtml(payload.alternatives[0], payload.criteria.criteria);
    expect(html).toContain(fmtProb(payload.alternatives[0].occupied_prob));
  });
});
