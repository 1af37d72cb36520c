/** Loading and validation of simulator summary CSVs. */

import * as fs from "fs";
import * as path from "path";

export const REQUIRED_COLUMNS = [
  "scenario",
  "algorithm",
  "users",
  "seed",
  "throughput_bps_total",
  "throughput_bps_video",
  "plr_video",
  "delay_ms_video_mean",
  "fairness_eq11_video",
  "jain_video",
  "handovers",
  "dropped_bits",
  "transmitted_bits",
  "arrived_bits",
  "wall_time_s",
] as const;

export interface SummaryRow {
  scenario: string;
  algorithm: string;
  users: number;
  seed: number;
  throughput_bps_total: number;
  throughput_bps_video: number;
  plr_video: number;
  delay_ms_video_mean: number;
  fairness_eq11_video: number;
  jain_video: number;
}

export class SchemaError extends Error {}
export class NoDataError extends Error {}

/** Parse one summary CSV; the writer never quotes fields, so a plain split is exact. */
export function parseSummaryCsv(filePath: string): SummaryRow[] {
  const text = fs.readFileSync(filePath, "utf-8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${filePath}: empty file`);
  }
  const header = lines[0].split(",");
  const missing = REQUIRED_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`${filePath}: missing columns ${missing.join(", ")}`);
  }
  const col = new Map(header.map((name, i) => [name, i]));
  const at = (fields: string[], name: string) => fields[col.get(name)!];
  return lines.slice(1).map((line, i) => {
    const fields = line.split(",");
    if (fields.length !== header.length) {
      throw new SchemaError(`${filePath}: row ${i + 2} has ${fields.length} fields, expected ${header.length}`);
    }
    const num = (name: string) => {
      const v = Number(at(fields, name));
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${filePath}: row ${i + 2} column ${name} is not numeric`);
      }
      return v;
    };
    return {
      scenario: at(fields, "scenario"),
      algorithm: at(fields, "algorithm"),
      users: num("users"),
      seed: num("seed"),
      throughput_bps_total: num("throughput_bps_total"),
      throughput_bps_video: num("throughput_bps_video"),
      plr_video: num("plr_video"),
      delay_ms_video_mean: num("delay_ms_video_mean"),
      fairness_eq11_video: num("fairness_eq11_video"),
      jain_video: num("jain_video"),
    };
  });
}

/** All rows from every summary*.csv in a sweep directory. */
export function loadSweepDir(dir: string): SummaryRow[] {
  if (!fs.existsSync(dir) || !fs.statSync(dir).isDirectory()) {
    throw new NoDataError(`${dir} is not a directory`);
  }
  const files = fs
    .readdirSync(dir)
    .filter((f) => f.startsWith("summary") && f.endsWith(".csv"))
    .sort();
  if (files.length === 0) {
    throw new NoDataError(`no summary*.csv files in ${dir}`);
  }
  return files.flatMap((f) => parseSummaryCsv(path.join(dir, f)));
}
