export {
  CsvError,
  NORM_COLUMNS,
  parseConvergenceCsv,
  parseDiagnosticsCsv,
  parseFieldCsv,
} from "./csv.js";
export type { ConvergenceData, DiagnosticsData, FieldData, NormName } from "./csv.js";

export {
  convergence,
  cutline,
  extractCut,
  fitSlope,
  heatmap,
  history,
} from "./charts.js";
export type { CutProfile, CutSpec } from "./charts.js";

export { colormap, fmtNum } from "./svg.js";

export { main, parseJob, render, UsageError } from "./cli.js";
export type { PlotJob, PlotKind } from "./cli.js";
