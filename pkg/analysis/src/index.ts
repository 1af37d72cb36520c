export { REQUIRED_COLUMNS, SchemaError, NoDataError, parseSummaryCsv, loadSweepDir } from "./csv.js";
export type { SummaryRow } from "./csv.js";
export { METRIC_COLUMNS, aggregate, algorithms, lookup, scenarios, userCounts } from "./aggregate.js";
export type { AggregatePoint, MetricColumn } from "./aggregate.js";
export { figureSpecs, renderFigure, renderFigures } from "./figures.js";
export type { FigureSpec } from "./figures.js";
export { formatNumber, gainsTable, renderReport } from "./report.js";
export type { GainCell } from "./report.js";
export { run } from "./cli.js";
