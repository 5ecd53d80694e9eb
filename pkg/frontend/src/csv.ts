/**
 * Parsers for the three CSV formats the icap CLI writes.
 *
 * Field CSV:        "# nx=<n> ny=<n> h=<h> t=<t>" then i,j,x,y,value rows,
 *                   row-major with j fastest.
 * Diagnostics CSV:  "time,smearing,max_smearing,min_z,max_z,mass" header
 *                   then one row per sample.
 * Convergence CSV:  "h,l1,l2,linf,econs" header, one row per grid, then
 *                   optional "# slope_<col>=<value>" footer lines.
 *
 * All parse errors carry the input name and 1-based line number so the CLI
 * can point at the offending line.
 */

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/** Parse failure in a CSV input; `line` is 1-based. */
export class CsvError extends Error {
  readonly source: string;
  readonly line: number;

  constructor(source: string, line: number, detail: string) {
    super(`${source}:${line}: ${detail}`);
    this.name = "CsvError";
    this.source = source;
    this.line = line;
  }
}

// ---------------------------------------------------------------------------
// Field CSV
// ---------------------------------------------------------------------------

export interface FieldData {
  nx: number;
  ny: number;
  h: number;
  t: number;
  /** Cell-center coordinates, length nx / ny. */
  x: Float64Array;
  y: Float64Array;
  /** Cell values, row-major: values[i * ny + j]. */
  values: Float64Array;
}

const FIELD_HEADER =
  /^# nx=(\d+) ny=(\d+) h=([-+0-9.eE]+) t=([-+0-9.eE]+)\s*$/;

function splitLines(text: string): string[] {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  return lines;
}

function parseNum(source: string, line: number, token: string, what: string): number {
  const v = Number(token);
  if (token.trim() === "" || Number.isNaN(v)) {
    throw new CsvError(source, line, `bad ${what} "${token}"`);
  }
  return v;
}

/**
 * Parse one field snapshot. `source` is used in error messages only,
 * typically the file path.
 */
export function parseFieldCsv(text: string, source: string): FieldData {
  const lines = splitLines(text);
  if (lines.length === 0) throw new CsvError(source, 1, "empty input");

  const m = FIELD_HEADER.exec(lines[0]);
  if (!m) {
    throw new CsvError(source, 1,
      `expected "# nx=.. ny=.. h=.. t=.." header, got "${lines[0]}"`);
  }
  const nx = Number(m[1]);
  const ny = Number(m[2]);
  const h = parseNum(source, 1, m[3], "h");
  const t = parseNum(source, 1, m[4], "t");
  if (nx < 1 || ny < 1) throw new CsvError(source, 1, `bad grid shape ${nx}x${ny}`);

  const expect = nx * ny;
  if (lines.length - 1 !== expect) {
    throw new CsvError(source, lines.length,
      `expected ${expect} data rows for ${nx}x${ny}, got ${lines.length - 1}`);
  }

  const x = new Float64Array(nx);
  const y = new Float64Array(ny);
  const values = new Float64Array(expect);
  for (let k = 0; k < expect; k++) {
    const lineNo = k + 2;
    const parts = lines[k + 1].split(",");
    if (parts.length !== 5) {
      throw new CsvError(source, lineNo, `expected 5 fields, got ${parts.length}`);
    }
    const i = parseNum(source, lineNo, parts[0], "i");
    const j = parseNum(source, lineNo, parts[1], "j");
    if (!Number.isInteger(i) || !Number.isInteger(j) ||
        i < 0 || i >= nx || j < 0 || j >= ny) {
      throw new CsvError(source, lineNo, `cell index (${parts[0]},${parts[1]}) out of range`);
    }
    // rows are written j-fastest; trust the indices, not the row order
    x[i] = parseNum(source, lineNo, parts[2], "x");
    y[j] = parseNum(source, lineNo, parts[3], "y");
    values[i * ny + j] = parseNum(source, lineNo, parts[4], "value");
  }
  return { nx, ny, h, t, x, y, values };
}

// ---------------------------------------------------------------------------
// Diagnostics CSV
// ---------------------------------------------------------------------------

export interface DiagnosticsData {
  /** Column names from the header; columns[0] is always "time". */
  columns: string[];
  /** One Float64Array per column, all the same length. */
  series: Map<string, Float64Array>;
  rows: number;
}

export function parseDiagnosticsCsv(text: string, source: string): DiagnosticsData {
  const lines = splitLines(text);
  if (lines.length === 0) throw new CsvError(source, 1, "empty input");

  const columns = lines[0].split(",").map((c) => c.trim());
  if (columns[0] !== "time" || columns.length < 2) {
    throw new CsvError(source, 1,
      `expected "time,<col>,.." header, got "${lines[0]}"`);
  }
  if (new Set(columns).size !== columns.length) {
    throw new CsvError(source, 1, "duplicate column names");
  }

  const n = lines.length - 1;
  const data = columns.map(() => new Float64Array(n));
  for (let r = 0; r < n; r++) {
    const lineNo = r + 2;
    const parts = lines[r + 1].split(",");
    if (parts.length !== columns.length) {
      throw new CsvError(source, lineNo,
        `expected ${columns.length} fields, got ${parts.length}`);
    }
    for (let c = 0; c < columns.length; c++) {
      data[c][r] = parseNum(source, lineNo, parts[c], columns[c]);
    }
  }

  const series = new Map<string, Float64Array>();
  columns.forEach((name, c) => series.set(name, data[c]));
  return { columns, series, rows: n };
}

// ---------------------------------------------------------------------------
// Convergence CSV
// ---------------------------------------------------------------------------

export const NORM_COLUMNS = ["l1", "l2", "linf", "econs"] as const;
export type NormName = (typeof NORM_COLUMNS)[number];

export interface ConvergenceData {
  /** Cell sizes, coarse to fine order as written. */
  h: Float64Array;
  norms: Map<NormName, Float64Array>;
  /** Slopes from "# slope_*=" footers; "exact" becomes null. Empty if absent. */
  reportedSlopes: Map<NormName, number | null>;
}

const SLOPE_FOOTER = /^# slope_(\w+)=(.+)$/;

export function parseConvergenceCsv(text: string, source: string): ConvergenceData {
  const lines = splitLines(text);
  if (lines.length === 0) throw new CsvError(source, 1, "empty input");

  const header = "h," + NORM_COLUMNS.join(",");
  if (lines[0].trim() !== header) {
    throw new CsvError(source, 1, `expected "${header}" header, got "${lines[0]}"`);
  }

  const dataRows: number[][] = [];
  const reportedSlopes = new Map<NormName, number | null>();
  let inFooter = false;
  for (let k = 1; k < lines.length; k++) {
    const lineNo = k + 1;
    const line = lines[k];
    if (line.startsWith("#")) {
      inFooter = true;
      const m = SLOPE_FOOTER.exec(line);
      if (!m || !(NORM_COLUMNS as readonly string[]).includes(m[1])) {
        throw new CsvError(source, lineNo, `unrecognized footer "${line}"`);
      }
      const val = m[2].trim();
      reportedSlopes.set(m[1] as NormName,
        val === "exact" ? null : parseNum(source, lineNo, val, `slope_${m[1]}`));
      continue;
    }
    if (inFooter) {
      throw new CsvError(source, lineNo, "data row after slope footer");
    }
    const parts = line.split(",");
    if (parts.length !== 5) {
      throw new CsvError(source, lineNo, `expected 5 fields, got ${parts.length}`);
    }
    dataRows.push(parts.map((p, c) =>
      parseNum(source, lineNo, p, c === 0 ? "h" : NORM_COLUMNS[c - 1])));
  }
  if (dataRows.length < 2) {
    throw new CsvError(source, lines.length, "need at least two grid rows");
  }

  const h = new Float64Array(dataRows.map((r) => r[0]));
  const norms = new Map<NormName, Float64Array>();
  NORM_COLUMNS.forEach((name, c) => {
    norms.set(name, new Float64Array(dataRows.map((r) => r[c + 1])));
  });
  return { h, norms, reportedSlopes };
}
