/** Display formatting. Values pass through unchanged apart from rounding for display. */

export function fmtFitness(x: number): string {
  return x.toFixed(4);
}

export function fmtProb(x: number): string {
  return x.toFixed(3);
}

export function fmtWatts(x: number): string {
  return x >= 1000 ? `${(x / 1000).toFixed(2)} kW` : `${x.toFixed(0)} W`;
}

export function fmtMinuteClock(minute: number): string {
  const m = ((minute % 1440) + 1440) % 1440;
  const h = Math.floor(m / 60);
  const mm = Math.floor(m % 60);
  return `${String(h).padStart(2, "0")}:${String(mm).padStart(2, "0")}`;
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
