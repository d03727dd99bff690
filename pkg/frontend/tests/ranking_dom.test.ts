// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { hydrateRankingTable, rankingTableHtml } from "../src/views/ranking.js";
import { FakeServer, cannedRow } from "./fake_server.js";

describe("ranking table interaction", () => {
  it("expands a clicked row into its rationale and collapses on re-click", () => {
    const server = new FakeServer();
    server.rows = [cannedRow({ index: 0 }), cannedRow({ index: 1, fitness: 0.2 })];
    const payload = server.rankingPayload();

    const host = document.createElement("div");
    host.innerHTML = rankingTableHtml(payload, false);
    hydrateRankingTable(host, payload);

    const firstRow = host.querySelector<HTMLTableRowElement>('tr.rank-row[data-index="0"]')!;
    const detail = host.querySelector<HTMLTableRowElement>('tr.rationale-row[data-for="0"]')!;
    expect(detail.hidden).toBe(true);

    firstRow.click();
    expect(detail.hidden).toBe(false);
    expect(detail.innerHTML).toContain('data-field="occupied_prob"');
    expect(detail.innerHTML).toContain("0.107"); // the served occupancy probability

    firstRow.click();
    expect(detail.hidden).toBe(true);
  });
});
