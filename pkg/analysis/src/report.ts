/** Gains table and the markdown report. */

import { AggregatePoint, MetricColumn, algorithms, lookup, userCounts } from "./aggregate.js";
import { FigureSpec } from "./figures.js";

export interface GainCell {
  algorithm: string;
  users: number;
  /** ratio of scenario means, numerator/denominator, per metric */
  ratio: Partial<Record<MetricColumn, number>>;
}

const GAIN_METRICS: MetricColumn[] = [
  "throughput_bps_total",
  "plr_video",
  "delay_ms_video_mean",
  "fairness_eq11_video",
];

/** Ratios of group means between two scenarios per (algorithm, users). */
export function gainsTable(
  table: AggregatePoint[],
  numerator = "hetnet",
  denominator = "macro",
): GainCell[] {
  const cells: GainCell[] = [];
  for (const algorithm of algorithms(table)) {
    for (const users of userCounts(table)) {
      const num = lookup(table, numerator, algorithm, users);
      const den = lookup(table, denominator, algorithm, users);
      if (!num || !den) {
        continue;
      }
      const ratio: Partial<Record<MetricColumn, number>> = {};
      for (const metric of GAIN_METRICS) {
        ratio[metric] = den.mean[metric] === 0 ? NaN : num.mean[metric] / den.mean[metric];
      }
      cells.push({ algorithm, users, ratio });
    }
  }
  return cells;
}

export function formatNumber(v: number, digits = 4): string {
  if (!Number.isFinite(v)) {
    return "n/a";
  }
  if (v !== 0 && (Math.abs(v) >= 1e6 || Math.abs(v) < 1e-3)) {
    return v.toExponential(digits - 1);
  }
  return v.toPrecision(digits);
}

/** The markdown report; every number comes straight from the passed tables. */
export function renderReport(
  table: AggregatePoint[],
  gains: GainCell[],
  figures: FigureSpec[],
): string {
  const lines: string[] = [];
  lines.push("# Sweep analysis");
  lines.push("");
  lines.push("## Aggregated results (mean ± sd over seeds)");
  lines.push("");
  lines.push("| scenario | algorithm | users | seeds | throughput (Mbit/s) | video PLR | video delay (ms) | fairness |");
  lines.push("| --- | --- | ---: | ---: | ---: | ---: | ---: | ---: |");
  for (const p of table) {
    lines.push(
      `| ${p.scenario} | ${p.algorithm} | ${p.users} | ${p.seeds} ` +
        `| ${formatNumber(p.mean.throughput_bps_total / 1e6)} ± ${formatNumber(p.sd.throughput_bps_total / 1e6)} ` +
        `| ${formatNumber(p.mean.plr_video)} ± ${formatNumber(p.sd.plr_video)} ` +
        `| ${formatNumber(p.mean.delay_ms_video_mean)} ± ${formatNumber(p.sd.delay_ms_video_mean)} ` +
        `| ${formatNumber(p.mean.fairness_eq11_video)} ± ${formatNumber(p.sd.fairness_eq11_video)} |`,
    );
  }
  lines.push("");
  lines.push("## HetNet / macro gains (ratio of scenario means)");
  lines.push("");
  lines.push("| algorithm | users | throughput | video PLR | video delay | fairness |");
  lines.push("| --- | ---: | ---: | ---: | ---: | ---: |");
  for (const cell of gains) {
    lines.push(
      `| ${cell.algorithm} | ${cell.users} ` +
        `| ${formatNumber(cell.ratio.throughput_bps_total ?? NaN)} ` +
        `| ${formatNumber(cell.ratio.plr_video ?? NaN)} ` +
        `| ${formatNumber(cell.ratio.delay_ms_video_mean ?? NaN)} ` +
        `| ${formatNumber(cell.ratio.fairness_eq11_video ?? NaN)} |`,
    );
  }
  lines.push("");
  lines.push("## Figures");
  lines.push("");
  for (const spec of figures) {
    lines.push(`- [${spec.title}](${spec.filename})`);
  }
  lines.push("");
  return lines.join("\n");
}
