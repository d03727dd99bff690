/**
 * Minimal fake of the loadrank service for client tests: stores criteria,
 * echoes them in ranking payloads, and records every request it sees.
 */

import type { FetchLike, RankingPayload, RankingRow } from "../src/api.js";

export function cannedRow(partial: Partial<RankingRow> = {}): RankingRow {
  return {
    rank: 1,
    index: 0,
    appliance_id: "Z1-pc",
    zone_id: "Z1",
    kind: "PlugLoad",
    setting_index: 2,
    setting_value: 0.0,
    label: "Z1/Z1-pc: plug off",
    fitness: 0.83214,
    occupied_prob: 0.10734,
    estimated_reduction_W: 150.0,
    expected_scores: { comfort: 0.892661, curtailment: 1.0 },
    mean_win_prob: { comfort: 0.61, curtailment: 0.97 },
    distributions: {
      comfort: [
        [0.0, 0.10734],
        [1.0, 0.89266],
      ],
      curtailment: [[1.0, 1.0]],
    },
    ...partial,
  };
}

export interface Recorded {
  method: string;
  url: string;
  body: unknown;
}

export class FakeServer {
  weights = [0.6, 0.4];
  nu = 0.75;
  rows: RankingRow[] = [cannedRow()];
  requests: Recorded[] = [];

  rankingPayload(): RankingPayload {
    return {
      computed_at_min: 600.0,
      horizon_min: 5.0,
      criteria: {
        criteria: ["comfort", "curtailment"],
        weights: [...this.weights],
        threshold: this.nu,
      },
      occupied: { Z1: true },
      alternatives: this.rows.map((r, i) => ({ ...r, rank: i + 1 })),
    };
  }

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    this.requests.push({ method, url, body });

    const json = (status: number, doc: unknown) =>
      new Response(JSON.stringify(doc), {
        status,
        headers: { "content-type": "application/json" },
      });

    if (url.startsWith("/api/criteria") && method === "PUT") {
      const weights = body.weights as number[];
      const sum = weights.reduce((a: number, b: number) => a + b, 0);
      if (Math.abs(sum - 1) > 1e-9) {
        return json(400, { detail: `weights sum to ${sum}` });
      }
      this.weights = weights;
      this.nu = body.nu ?? this.nu;
      return json(200, { ok: true, weights, nu: this.nu });
    }
    if (url.startsWith("/api/criteria")) {
      return json(200, { criteria: ["comfort", "curtailment"], weights: this.weights, nu: this.nu });
    }
    if (url.startsWith("/api/ranking")) {
      return json(200, this.rankingPayload());
    }
    return json(404, { detail: `no fake route for ${method} ${url}` });
  };
}
