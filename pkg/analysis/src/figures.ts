/** SVG line charts: one per (metric, scenario), algorithms as series. */

import * as fs from "fs";
import * as path from "path";

import { AggregatePoint, MetricColumn, algorithms, lookup, userCounts } from "./aggregate.js";

export interface FigureSpec {
  metric: MetricColumn;
  scenario: string;
  yLabel: string;
  title: string;
  filename: string;
  scale: number; // multiplies raw values for display (e.g. bps -> Mbps)
}

const METRIC_PRESENTATION: Array<{ metric: MetricColumn; yLabel: string; name: string; scale: number }> = [
  { metric: "throughput_bps_total", yLabel: "Throughput (Mbit/s)", name: "Average system throughput", scale: 1e-6 },
  { metric: "plr_video", yLabel: "Packet loss ratio", name: "PLR of video flows", scale: 1 },
  { metric: "delay_ms_video_mean", yLabel: "Delay (ms)", name: "Packet delay of video flows", scale: 1 },
  { metric: "fairness_eq11_video", yLabel: "Fairness index", name: "Fairness index of video flows", scale: 1 },
];

const SCENARIO_LABEL: Record<string, string> = {
  macro: "single macro cell",
  hetnet: "macro with picos",
};

const SERIES_COLORS: Record<string, string> = {
  pf: "#1f77b4",
  mlwdf: "#d62728",
  exppf: "#2ca02c",
};

export function figureSpecs(table: AggregatePoint[]): FigureSpec[] {
  const specs: FigureSpec[] = [];
  for (const scenario of [...new Set(table.map((p) => p.scenario))].sort()) {
    for (const m of METRIC_PRESENTATION) {
      specs.push({
        metric: m.metric,
        scenario,
        yLabel: m.yLabel,
        title: `${m.name} (${SCENARIO_LABEL[scenario] ?? scenario})`,
        filename: `${m.metric}_${scenario}.svg`,
        scale: m.scale,
      });
    }
  }
  return specs;
}

const W = 640;
const H = 420;
const MARGIN = { left: 70, right: 20, top: 48, bottom: 56 };

function ticks(maxValue: number, count = 5): number[] {
  if (maxValue <= 0) {
    return [0, 1];
  }
  const step = maxValue / count;
  const magnitude = 10 ** Math.floor(Math.log10(step));
  const nice = [1, 2, 2.5, 5, 10].find((m) => m * magnitude >= step)! * magnitude;
  const out: number[] = [];
  for (let v = 0; v <= maxValue + nice * 0.5; v += nice) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render one figure as a standalone SVG string. */
export function renderFigure(table: AggregatePoint[], spec: FigureSpec): string {
  const points = table.filter((p) => p.scenario === spec.scenario);
  const xs = userCounts(points);
  const series = algorithms(points);
  const values = points.map((p) => p.mean[spec.metric] * spec.scale);
  const yMax = Math.max(...values, 0) * 1.08 || 1;
  const yTicks = ticks(yMax);
  const yTop = yTicks[yTicks.length - 1];
  const plotW = W - MARGIN.left - MARGIN.right;
  const plotH = H - MARGIN.top - MARGIN.bottom;
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const px = (u: number) => MARGIN.left + (xMax === xMin ? plotW / 2 : ((u - xMin) / (xMax - xMin)) * plotW);
  const py = (v: number) => MARGIN.top + plotH - (v / yTop) * plotH;

  const seedCounts = [...new Set(points.map((p) => p.seeds))].sort((a, b) => a - b);
  const seedNote =
    seedCounts.length === 1 ? `mean over ${seedCounts[0]} seed(s)` : `mean over ${seedCounts[0]}-${seedCounts[seedCounts.length - 1]} seeds`;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif">`);
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${W / 2}" y="22" text-anchor="middle" font-size="15" font-weight="bold">${esc(spec.title)}</text>`);
  parts.push(`<text x="${W / 2}" y="40" text-anchor="middle" font-size="11" fill="#555">${esc(seedNote)}</text>`);
  // axes
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${H - MARGIN.bottom}" stroke="black"/>`);
  parts.push(`<line x1="${MARGIN.left}" y1="${H - MARGIN.bottom}" x2="${W - MARGIN.right}" y2="${H - MARGIN.bottom}" stroke="black"/>`);
  for (const t of yTicks) {
    const y = py(t);
    parts.push(`<line x1="${MARGIN.left - 4}" y1="${y}" x2="${W - MARGIN.right}" y2="${y}" stroke="#ddd"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end" font-size="11">${t}</text>`);
  }
  for (const u of xs) {
    const x = px(u);
    parts.push(`<line x1="${x}" y1="${H - MARGIN.bottom}" x2="${x}" y2="${H - MARGIN.bottom + 4}" stroke="black"/>`);
    parts.push(`<text x="${x}" y="${H - MARGIN.bottom + 18}" text-anchor="middle" font-size="11">${u}</text>`);
  }
  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${H - 14}" text-anchor="middle" font-size="12">Number of users</text>`);
  parts.push(`<text transform="rotate(-90 16 ${MARGIN.top + plotH / 2})" x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12">${esc(spec.yLabel)}</text>`);
  // series
  series.forEach((algo, si) => {
    const color = SERIES_COLORS[algo] ?? "#777";
    const pts = xs
      .map((u) => [u, lookup(points, spec.scenario, algo, u)] as const)
      .filter(([, p]) => p !== undefined)
      .map(([u, p]) => [px(u), py(p!.mean[spec.metric] * spec.scale)] as const);
    if (pts.length > 1) {
      parts.push(`<polyline fill="none" stroke="${color}" stroke-width="2" points="${pts.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ")}"/>`);
    }
    for (const [x, y] of pts) {
      parts.push(`<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="3.5" fill="${color}"/>`);
    }
    const lx = MARGIN.left + 12;
    const ly = MARGIN.top + 14 + si * 18;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}" font-size="12">${esc(algo.toUpperCase())}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}

/** Write every figure; returns the written filenames in spec order. */
export function renderFigures(table: AggregatePoint[], outDir: string): FigureSpec[] {
  fs.mkdirSync(outDir, { recursive: true });
  const specs = figureSpecs(table);
  for (const spec of specs) {
    fs.writeFileSync(path.join(outDir, spec.filename), renderFigure(table, spec));
  }
  return specs;
}
