/**
 * Hand-rolled SVG line charts: pure data -> markup, no chart library.
 */

export interface Series {
  label: string;
  values: number[];
  color: string;
  /** render as steps instead of straight segments */
  step?: boolean;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  yLabel?: string;
  xTicks?: { at: number; label: string }[];
}

const MARGIN = { left: 46, right: 8, top: 8, bottom: 18 };

function scale(v: number, lo: number, hi: number, outLo: number, outHi: number): number {
  if (hi === lo) return (outLo + outHi) / 2;
  return outLo + ((v - lo) / (hi - lo)) * (outHi - outLo);
}

export function polylinePoints(
  values: number[],
  xs: number[],
  bounds: { xLo: number; xHi: number; yLo: number; yHi: number },
  box: { w: number; h: number },
  step = false,
): string {
  const pts: string[] = [];
  let prevY: string | null = null;
  for (let i = 0; i < values.length; i++) {
    const x = scale(xs[i], bounds.xLo, bounds.xHi, MARGIN.left, box.w - MARGIN.right).toFixed(1);
    const y = scale(values[i], bounds.yLo, bounds.yHi, box.h - MARGIN.bottom, MARGIN.top).toFixed(1);
    if (step && prevY !== null) {
      pts.push(`${x},${prevY}`); // hold the previous level until this x
    }
    pts.push(`${x},${y}`);
    prevY = y;
  }
  return pts.join(" ");
}

export function lineChart(xs: number[], series: Series[], opts: ChartOptions = {}): string {
  const w = opts.width ?? 640;
  const h = opts.height ?? 180;
  const all = series.flatMap((s) => s.values).filter((v) => Number.isFinite(v));
  if (xs.length === 0 || all.length === 0) {
    return `<svg class="chart" viewBox="0 0 ${w} ${h}"><text x="${w / 2}" y="${h / 2}" text-anchor="middle" class="chart-empty">no data yet</text></svg>`;
  }
  const yLo = Math.min(...all, 0);
  const yHi = Math.max(...all) * 1.05 || 1;
  const bounds = { xLo: xs[0], xHi: xs[xs.length - 1], yLo, yHi };
  const box = { w, h };

  const lines = series
    .map(
      (s) =>
        `<polyline fill="none" stroke="${s.color}" stroke-width="1.5" points="${polylinePoints(
          s.values,
          xs,
          bounds,
          box,
          s.step,
        )}"/>`,
    )
    .join("");
  const legend = series
    .map(
      (s, i) =>
        `<text x="${MARGIN.left + 4 + i * 150}" y="${MARGIN.top + 10}" fill="${s.color}" class="chart-legend">${s.label}</text>`,
    )
    .join("");
  const yTicks = [yLo, (yLo + yHi) / 2, yHi]
    .map((v) => {
      const y = scale(v, yLo, yHi, h - MARGIN.bottom, MARGIN.top);
      return `<text x="${MARGIN.left - 4}" y="${y + 3}" text-anchor="end" class="chart-tick">${Math.round(v)}</text><line x1="${MARGIN.left}" x2="${w - MARGIN.right}" y1="${y}" y2="${y}" class="chart-grid"/>`;
    })
    .join("");
  const xTicks = (opts.xTicks ?? [])
    .map((t) => {
      const x = scale(t.at, bounds.xLo, bounds.xHi, MARGIN.left, w - MARGIN.right);
      return `<text x="${x}" y="${h - 4}" text-anchor="middle" class="chart-tick">${t.label}</text>`;
    })
    .join("");
  return `<svg class="chart" viewBox="0 0 ${w} ${h}" preserveAspectRatio="none">${yTicks}${lines}${legend}${xTicks}</svg>`;
}

/** Tiny horizontal bar strip for a discrete score distribution. */
export function distributionBars(atoms: [number, number][], color: string): string {
  const rows = atoms
    .map(([value, prob]) => {
      const width = Math.max(1, Math.round(prob * 120));
      return `<div class="dist-row"><span class="dist-value">${value.toFixed(4)}</span><span class="dist-bar" style="width:${width}px;background:${color}"></span><span class="dist-prob">${prob.toFixed(3)}</span></div>`;
    })
    .join("");
  return `<div class="dist">${rows}</div>`;
}
