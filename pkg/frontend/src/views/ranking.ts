/**
 * Ranking table with expandable per-alternative rationale.
 *
 * Renders exclusively from the ranking payload: fitness, expected scores,
 * win probabilities, score distributions and the occupancy probability all
 * come verbatim from the server response. Nothing is recomputed here.
 */

import type { RankingPayload, RankingRow } from "../api.js";
import { distributionBars } from "../charts.js";
import { escapeHtml, fmtFitness, fmtProb, fmtWatts } from "../format.js";

const CRITERION_COLORS: Record<string, string> = {
  comfort: "#2b7a3d",
  curtailment: "#1f5fa8",
};

export interface RankingTableRow {
  rank: string;
  label: string;
  zone: string;
  fitness: string;
  occupiedProb: string;
  reduction: string;
  expected: Record<string, string>;
  index: number;
}

/** Flatten payload rows into display strings; a pure projection of the payload. */
export function buildTableRows(payload: RankingPayload): RankingTableRow[] {
  return payload.alternatives.map((row) => ({
    rank: String(row.rank),
    label: row.label,
    zone: row.zone_id,
    fitness: fmtFitness(row.fitness),
    occupiedProb: fmtProb(row.occupied_prob),
    reduction: fmtWatts(row.estimated_reduction_W),
    expected: Object.fromEntries(
      payload.criteria.criteria.map((c) => [c, fmtProb(row.expected_scores[c])]),
    ),
    index: row.index,
  }));
}

export function rationaleHtml(row: RankingRow, criteria: string[]): string {
  const sections = criteria
    .map((c) => {
      const color = CRITERION_COLORS[c] ?? "#666";
      const dist = distributionBars(row.distributions[c], color);
      return `<div class="rationale-criterion">
        <h4>${escapeHtml(c)}</h4>
        <p>expected score <b>${fmtProb(row.expected_scores[c])}</b>,
           mean win probability vs field <b>${fmtProb(row.mean_win_prob[c])}</b></p>
        ${dist}
      </div>`;
    })
    .join("");
  return `<div class="rationale">
    <p class="rationale-occ">occupancy probability driving the comfort mixture:
      <b data-field="occupied_prob">${fmtProb(row.occupied_prob)}</b>
      (zone ${escapeHtml(row.zone_id)} at the decision horizon)</p>
    <p>estimated reduction <b>${fmtWatts(row.estimated_reduction_W)}</b>,
       fitness <b>${fmtFitness(row.fitness)}</b></p>
    ${sections}
  </div>`;
}

export function rankingTableHtml(payload: RankingPayload, stale: boolean): string {
  if (payload.alternatives.length === 0) {
    return `<p class="empty-state">No control alternatives: the building has no non-baseline settings to rank.</p>`;
  }
  const criteria = payload.criteria.criteria;
  const headExpected = criteria.map((c) => `<th>E[${escapeHtml(c)}]</th>`).join("");
  const body = buildTableRows(payload)
    .map(
      (row) => `
      <tr class="rank-row" data-index="${row.index}">
        <td>${row.rank}</td>
        <td class="rank-label">${escapeHtml(row.label)}</td>
        <td data-field="fitness">${row.fitness}</td>
        <td data-field="occupied_prob">${row.occupiedProb}</td>
        <td>${row.reduction}</td>
        ${criteria.map((c) => `<td>${row.expected[c]}</td>`).join("")}
      </tr>
      <tr class="rationale-row" data-for="${row.index}" hidden><td colspan="${5 + criteria.length}"></td></tr>`,
    )
    .join("");
  const staleBanner = stale
    ? `<p class="stale-banner" data-field="stale">weights changed since this ranking was computed - refresh to recompute</p>`
    : "";
  return `${staleBanner}
  <table class="ranking">
    <thead>
      <tr><th>#</th><th>alternative</th><th>fitness</th><th>P(occupied)</th><th>est. reduction</th>${headExpected}</tr>
    </thead>
    <tbody>${body}</tbody>
  </table>`;
}

/** Wire row expansion; the rationale is rendered lazily from the same payload. */
export function hydrateRankingTable(container: HTMLElement, payload: RankingPayload): void {
  const byIndex = new Map(payload.alternatives.map((r) => [r.index, r]));
  container.querySelectorAll<HTMLTableRowElement>("tr.rank-row").forEach((tr) => {
    tr.addEventListener("click", () => {
      const index = Number(tr.dataset.index);
      const detail = container.querySelector<HTMLTableRowElement>(
        `tr.rationale-row[data-for="${index}"]`,
      );
      if (!detail) return;
      if (detail.hidden) {
        const row = byIndex.get(index);
        if (row) {
          detail.cells[0].innerHTML = rationaleHtml(row, payload.criteria.criteria);
        }
        detail.hidden = false;
      } else {
        detail.hidden = true;
      }
    });
  });
}
