import { describe, expect, it } from "vitest";

import { ConsoleStore, renormalized } from "../src/state.js";

describe("weight renormalization", () => {
  it("scales raw slider values to a unit sum", () => {
    expect(renormalized([0.7, 0.7])).toEqual([0.5, 0.5]);
    const w = renormalized([3, 1]);
    expect(w[0]).toBeCloseTo(0.75, 12);
    expect(w[0] + w[1]).toBe(1);
  });

  it("sum is exactly one even for awkward fractions", () => {
    const w = renormalized([0.1, 0.2, 0.3]);
    expect(w.reduce((a, b) => a + b, 0)).toBe(1);
  });

  it("falls back to uniform when everything is zero", () => {
    expect(renormalized([0, 0])).toEqual([0.5, 0.5]);
  });
});

describe("ranking staleness", () => {
  it("flags the table when weights moved after the ranking", () => {
    const store = new ConsoleStore();
    store.rankingReceived([0.6, 0.4]);
    expect(store.rankingStale()).toBe(false);
    store.setSlider(0, 1.0);
    expect(store.rankingStale()).toBe(true);
    store.rankingReceived(store.submissionWeights());
    expect(store.rankingStale()).toBe(false);
  });

  it("is never stale before the first ranking", () => {
    const store = new ConsoleStore();
    store.setSlider(0, 0.9);
    expect(store.rankingStale()).toBe(false);
  });
});
