#!/usr/bin/env node
/** analyze --in <sweep dir> --out <report dir> */

import * as fs from "fs";
import * as path from "path";

import { aggregate } from "./aggregate.js";
import { NoDataError, SchemaError, loadSweepDir } from "./csv.js";
import { renderFigures } from "./figures.js";
import { gainsTable, renderReport } from "./report.js";

function parseArgs(argv: string[]): { inDir: string; outDir: string } {
  let inDir: string | undefined;
  let outDir: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--in") {
      inDir = argv[++i];
    } else if (argv[i] === "--out") {
      outDir = argv[++i];
    } else if (argv[i] === "--help" || argv[i] === "-h") {
      console.log("usage: analyze --in <sweep dir> --out <report dir>");
      process.exit(0);
    } else {
      throw new Error(`unknown argument ${argv[i]}`);
    }
  }
  if (!inDir || !outDir) {
    throw new Error("both --in and --out are required");
  }
  return { inDir, outDir };
}

export function run(argv: string[]): number {
  try {
    const { inDir, outDir } = parseArgs(argv);
    const rows = loadSweepDir(inDir);
    const table = aggregate(rows);
    const figures = renderFigures(table, outDir);
    const gains = gainsTable(table);
    fs.writeFileSync(path.join(outDir, "report.md"), renderReport(table, gains, figures));
    console.log(
      `analyzed ${rows.length} runs -> ${figures.length} figures + report.md in ${outDir}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof NoDataError || err instanceof Error) {
      console.error(`analyze: ${err.message}`);
    }
    return 1;
  }
}

// invoked directly (not imported by tests)
if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(run(process.argv.slice(2)));
}
