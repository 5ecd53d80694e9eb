/**
 * Chart builders. Each takes parsed CSV data and returns a complete SVG
 * document as a string; file IO lives in the CLI layer.
 */

import {
  ConvergenceData,
  DiagnosticsData,
  FieldData,
  NORM_COLUMNS,
  NormName,
} from "./csv.js";
import {
  PALETTE,
  Scale,
  SvgDoc,
  colormap,
  drawAxes,
  drawColorbar,
  drawLegend,
  fmtNum,
  linearScale,
  logScale,
  makeFrame,
} from "./svg.js";

// ---------------------------------------------------------------------------
// Heatmap
// ---------------------------------------------------------------------------

export interface HeatmapOpts {
  /** Plot log10(z(1-z) + 1e-10) instead of z, highlighting mixed cells. */
  mix?: boolean;
  title?: string;
}

const MIX_FLOOR = 1e-10;
// fixed color ranges so frames from different runs are comparable
const Z_RANGE: [number, number] = [0, 1];
const MIX_RANGE: [number, number] = [-10, 0];

export function heatmap(field: FieldData, opts: HeatmapOpts = {}): string {
  const { nx, ny, h } = field;
  const mix = opts.mix ?? false;
  const [vmin, vmax] = mix ? MIX_RANGE : Z_RANGE;
  const value = mix
    ? (z: number) => Math.log10(z * (1 - z) + MIX_FLOOR)
    : (z: number) => z;

  const frame = makeFrame(700, 560, { l: 70, r: 120, t: 44, b: 56 });
  const title = opts.title ??
    `${mix ? "log10 z(1-z)" : "z"} at t = ${fmtNum(field.t)} (${nx}x${ny})`;
  const doc = new SvgDoc(frame, title);

  const x0 = field.x[0] - 0.5 * h;
  const y0 = field.y[0] - 0.5 * h;
  const xs = linearScale(x0, x0 + nx * h, frame.left, frame.right);
  const ys = linearScale(y0, y0 + ny * h, frame.bottom, frame.top);
  const pw = (frame.right - frame.left) / nx;
  const ph = (frame.bottom - frame.top) / ny;

  // one rect per run of equal-color cells along each column of constant j,
  // which collapses uniform regions to a handful of shapes
  for (let j = 0; j < ny; j++) {
    const py = ys(y0 + (j + 1) * h);
    let runStart = 0;
    let runColor = cellColor(field, 0, j, value, vmin, vmax);
    for (let i = 1; i <= nx; i++) {
      const c = i < nx ? cellColor(field, i, j, value, vmin, vmax) : "";
      if (c !== runColor) {
        const px = xs(x0 + runStart * h);
        doc.rect(px, py, pw * (i - runStart) + 0.25, ph + 0.25, runColor);
        runStart = i;
        runColor = c;
      }
    }
  }

  drawAxes(doc, xs, ys, { label: "x" }, { label: "y" });
  drawColorbar(doc, vmin, vmax, mix ? "log10" : "z");
  return doc.toString();
}

function cellColor(field: FieldData, i: number, j: number,
                   value: (z: number) => number, vmin: number, vmax: number): string {
  const v = value(field.values[i * field.ny + j]);
  return colormap((v - vmin) / (vmax - vmin));
}

// ---------------------------------------------------------------------------
// Cut extraction
// ---------------------------------------------------------------------------

export type CutSpec =
  | { axis: "x" | "y"; offset: number }
  | { axis: "diagonal" };

export interface CutProfile {
  /** Monotone coordinate along the cut. */
  coord: Float64Array;
  value: Float64Array;
  /** e.g. "y = 0.7031" (the actual row center), or "diagonal". */
  label: string;
}

/**
 * Extract cell values along a cut. An axis cut picks the nearest row or
 * column of cell centers, so the sample count is exactly nx (cut across x)
 * or ny. The diagonal walks cells (k,k).
 */
export function extractCut(field: FieldData, spec: CutSpec): CutProfile {
  const { nx, ny } = field;
  if (spec.axis === "diagonal") {
    const n = Math.min(nx, ny);
    const coord = new Float64Array(n);
    const value = new Float64Array(n);
    const inv = Math.SQRT1_2;
    for (let k = 0; k < n; k++) {
      coord[k] = (field.x[k] + field.y[k]) * inv;
      value[k] = field.values[k * ny + k];
    }
    return { coord, value, label: "diagonal" };
  }

  if (spec.axis === "y") {
    // cut at constant y: one sample per column
    const j = nearestIndex(field.y, spec.offset);
    const value = new Float64Array(nx);
    for (let i = 0; i < nx; i++) value[i] = field.values[i * ny + j];
    return { coord: field.x.slice(), value, label: `y = ${fmtNum(field.y[j])}` };
  }
  const i = nearestIndex(field.x, spec.offset);
  return {
    coord: field.y.slice(),
    value: field.values.slice(i * ny, (i + 1) * ny),
    label: `x = ${fmtNum(field.x[i])}`,
  };
}

function nearestIndex(centers: Float64Array, target: number): number {
  let best = 0;
  for (let k = 1; k < centers.length; k++) {
    if (Math.abs(centers[k] - target) < Math.abs(centers[best] - target)) best = k;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Cutline plot
// ---------------------------------------------------------------------------

export interface CutlineOpts {
  title?: string;
  /** Legend labels, one per field; defaults to file stems set by the CLI. */
  labels?: string[];
}

export function cutline(fields: FieldData[], spec: CutSpec,
                        opts: CutlineOpts = {}): string {
  const profiles = fields.map((f) => extractCut(f, spec));
  const frame = makeFrame(640, 440, { l: 64, r: 24, t: 44, b: 56 });
  const title = opts.title ??
    `z along ${profiles[0].label} at t = ${fmtNum(fields[0].t)}`;
  const doc = new SvgDoc(frame, title);

  let lo = 0;
  let hi = 1;
  for (const p of profiles) {
    for (const v of p.value) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  const pad = 0.05 * (hi - lo);
  const xs = linearScale(min(profiles[0].coord), max(profiles[0].coord),
                         frame.left, frame.right);
  const ys = linearScale(lo - pad, hi + pad, frame.bottom, frame.top);

  profiles.forEach((p, k) => {
    const color = PALETTE[k % PALETTE.length];
    const pts: Array<[number, number]> = [];
    for (let m = 0; m < p.coord.length; m++) {
      pts.push([xs(p.coord[m]), ys(p.value[m])]);
    }
    doc.polyline(pts, color);
    if (p.coord.length <= 80) {
      for (const [px, py] of pts) doc.circle(px, py, 2, color);
    }
  });

  drawAxes(doc, xs, ys,
           { label: spec.axis === "diagonal" ? "distance along diagonal"
                                             : spec.axis === "y" ? "x" : "y" },
           { label: "z" });
  if (profiles.length > 1) {
    drawLegend(doc, profiles.map((_, k) => ({
      label: opts.labels?.[k] ?? `field ${k + 1}`,
      color: PALETTE[k % PALETTE.length],
    })));
  }
  return doc.toString();
}

function min(a: Float64Array): number {
  return a.reduce((m, v) => Math.min(m, v), Infinity);
}

function max(a: Float64Array): number {
  return a.reduce((m, v) => Math.max(m, v), -Infinity);
}

// ---------------------------------------------------------------------------
// Diagnostics history
// ---------------------------------------------------------------------------

export interface HistoryOpts {
  /** Columns to plot; default smearing and max_smearing. */
  cols?: string[];
  title?: string;
  labels?: string[];
}

export function history(runs: DiagnosticsData[], opts: HistoryOpts = {}): string {
  const cols = opts.cols ?? ["smearing", "max_smearing"];
  for (const d of runs) {
    for (const c of cols) {
      if (!d.series.has(c)) {
        throw new Error(`diagnostics column "${c}" not found; ` +
                        `have ${d.columns.join(", ")}`);
      }
    }
  }

  const frame = makeFrame(640, 440, { l: 76, r: 24, t: 44, b: 56 });
  const doc = new SvgDoc(frame, opts.title ?? `history: ${cols.join(", ")}`);

  let tMax = -Infinity;
  let lo = Infinity;
  let hi = -Infinity;
  for (const d of runs) {
    tMax = Math.max(tMax, max(d.series.get("time")!));
    for (const c of cols) {
      lo = Math.min(lo, min(d.series.get(c)!));
      hi = Math.max(hi, max(d.series.get(c)!));
    }
  }
  const pad = 0.05 * (hi - lo || 1);
  const xs = linearScale(0, tMax, frame.left, frame.right);
  const ys = linearScale(lo - pad, hi + pad, frame.bottom, frame.top);

  const legend: Array<{ label: string; color: string; dash?: string }> = [];
  runs.forEach((d, r) => {
    const time = d.series.get("time")!;
    cols.forEach((c, ci) => {
      const color = PALETTE[(runs.length > 1 ? r : ci) % PALETTE.length];
      const dash = runs.length > 1 && ci > 0 ? "5,3" : undefined;
      const v = d.series.get(c)!;
      const pts: Array<[number, number]> = [];
      for (let m = 0; m < v.length; m++) pts.push([xs(time[m]), ys(v[m])]);
      doc.polyline(pts, color, 1.5, dash);
      const name = runs.length > 1 ? `${opts.labels?.[r] ?? `run ${r + 1}`}: ${c}` : c;
      legend.push({ label: name, color, dash });
    });
  });

  drawAxes(doc, xs, ys, { label: "t" }, { label: cols.join(", ") });
  if (legend.length > 1) drawLegend(doc, legend);
  return doc.toString();
}

// ---------------------------------------------------------------------------
// Convergence plot
// ---------------------------------------------------------------------------

/**
 * Least-squares slope of log(err) vs log(h), ignoring non-positive entries.
 * Returns null when fewer than two usable points remain (e.g. an error
 * that is exactly zero on every grid).
 */
export function fitSlope(h: Float64Array, err: Float64Array): number | null {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let k = 0; k < h.length; k++) {
    if (err[k] > 0) {
      lx.push(Math.log(h[k]));
      ly.push(Math.log(err[k]));
    }
  }
  const n = lx.length;
  if (n < 2) return null;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let k = 0; k < n; k++) {
    num += (lx[k] - mx) * (ly[k] - my);
    den += (lx[k] - mx) ** 2;
  }
  return num / den;
}

export interface ConvergenceOpts {
  /** Norm columns to show; default all four. */
  cols?: NormName[];
  title?: string;
}

export function convergence(data: ConvergenceData,
                            opts: ConvergenceOpts = {}): string {
  const cols = opts.cols ?? [...NORM_COLUMNS];
  const frame = makeFrame(640, 480, { l: 76, r: 24, t: 44, b: 56 });
  const doc = new SvgDoc(frame, opts.title ?? "grid convergence");

  const h = data.h;
  let lo = Infinity;
  let hi = -Infinity;
  for (const c of cols) {
    for (const v of data.norms.get(c)!) {
      if (v > 0) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (!Number.isFinite(lo)) {
    throw new Error("no positive error values to plot");
  }
  const xs = logScale(min(h) / 1.3, max(h) * 1.3, frame.left, frame.right);
  const ys = logScale(lo / 2, hi * 2, frame.bottom, frame.top);

  const legend: Array<{ label: string; color: string }> = [];
  cols.forEach((c, k) => {
    const color = PALETTE[k % PALETTE.length];
    const err = data.norms.get(c)!;
    const slope = fitSlope(h, err);
    if (slope !== null) {
      drawFitLine(doc, xs, ys, h, err, slope, color);
    }
    for (let m = 0; m < h.length; m++) {
      if (err[m] > 0) doc.circle(xs(h[m]), ys(err[m]), 3.5, color);
    }
    legend.push({
      label: slope === null ? `${c} (exact)` : `${c}: slope ${slope.toFixed(2)}`,
      color,
    });
  });

  drawAxes(doc, xs, ys, { label: "h", log: true }, { label: "error", log: true });
  drawLegend(doc, legend);
  return doc.toString();
}

function drawFitLine(doc: SvgDoc, xs: Scale, ys: Scale, h: Float64Array,
                     err: Float64Array, slope: number, color: string): void {
  // intercept from the mean of the fit residuals in log space
  let c = 0;
  let n = 0;
  for (let k = 0; k < h.length; k++) {
    if (err[k] > 0) {
      c += Math.log(err[k]) - slope * Math.log(h[k]);
      n++;
    }
  }
  c /= n;
  const hLo = min(h) / 1.15;
  const hHi = max(h) * 1.15;
  doc.polyline(
    [
      [xs(hLo), ys(Math.exp(c + slope * Math.log(hLo)))],
      [xs(hHi), ys(Math.exp(c + slope * Math.log(hHi)))],
    ],
    color, 1, "5,3");
}
