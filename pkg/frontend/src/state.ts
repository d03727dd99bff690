/**
 * View-model store: criteria slider state and ranking staleness.
 *
 * Slider positions are free-form; weights are renormalized to sum to 1 right
 * before submission so the server always receives a valid vector. A ranking
 * is "stale" when the weights changed after it was computed — the table stays
 * on screen but is flagged until the next refresh.
 */

export interface SliderState {
  labels: string[];
  raw: number[];
  nu: number;
}

export function renormalized(raw: number[]): number[] {
  const total = raw.reduce((a, b) => a + b, 0);
  if (total <= 0) {
    return raw.map(() => 1 / raw.length);
  }
  const weights = raw.map((w) => w / total);
  // force an exact unit sum so server-side validation cannot see drift
  weights[weights.length - 1] = 1 - weights.slice(0, -1).reduce((a, b) => a + b, 0);
  return weights;
}

export class ConsoleStore {
  sliders: SliderState = { labels: ["comfort", "curtailment"], raw: [0.6, 0.4], nu: 0.75 };
  /** weights echoed by the last ranking response */
  lastRankingWeights: number[] | null = null;

  setSlider(index: number, value: number): void {
    this.sliders.raw[index] = value;
  }

  submissionWeights(): number[] {
    return renormalized(this.sliders.raw);
  }

  rankingReceived(echoedWeights: number[]): void {
    this.lastRankingWeights = [...echoedWeights];
  }

  rankingStale(): boolean {
    if (this.lastRankingWeights === null) return false;
    const current = this.submissionWeights();
    if (current.length !== this.lastRankingWeights.length) return true;
    return current.some((w, i) => Math.abs(w - this.lastRankingWeights![i]) > 1e-9);
  }
}
