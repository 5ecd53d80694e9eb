/**
 * Small SVG toolkit shared by the chart builders: linear and log scales,
 * tick generation, axis drawing, and the fixed colormap.
 *
 * The colormap is a 9-stop viridis ramp interpolated linearly in RGB. It is
 * deliberately hardcoded so images stay comparable across runs and machines.
 */

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Compact axis-label formatting: trims trailing zeros, switches to
 *  exponent form away from O(1). */
export function fmtNum(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(2).replace(/\.?0+e/, "e");
  }
  return String(parseFloat(v.toPrecision(6)));
}

// ---------------------------------------------------------------------------
// Scales and ticks
// ---------------------------------------------------------------------------

export interface Scale {
  (v: number): number;
  readonly min: number;
  readonly max: number;
}

export function linearScale(min: number, max: number, lo: number, hi: number): Scale {
  const span = max - min || 1;
  const f = (v: number) => lo + ((v - min) / span) * (hi - lo);
  return Object.assign(f, { min, max });
}

/** Log10 scale; domain values must be positive. */
export function logScale(min: number, max: number, lo: number, hi: number): Scale {
  const lmin = Math.log10(min);
  const span = Math.log10(max) - lmin || 1;
  const f = (v: number) => lo + ((Math.log10(v) - lmin) / span) * (hi - lo);
  return Object.assign(f, { min, max });
}

export function niceTicks(min: number, max: number, count = 6): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    // clean up -0 and accumulated float noise
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : parseFloat(v.toPrecision(12)));
  }
  return ticks;
}

/** Powers of ten covering [min, max], for log axes. */
export function decadeTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); Math.pow(10, e) <= max * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length >= 2 ? ticks : [min, max];
}

// ---------------------------------------------------------------------------
// Colormap
// ---------------------------------------------------------------------------

const VIRIDIS_STOPS: ReadonlyArray<readonly [number, number, number]> = [
  [0x44, 0x01, 0x54],
  [0x47, 0x2d, 0x7b],
  [0x3b, 0x52, 0x8b],
  [0x2c, 0x72, 0x8e],
  [0x21, 0x91, 0x8c],
  [0x27, 0xad, 0x81],
  [0x5e, 0xc9, 0x62],
  [0xaa, 0xdc, 0x32],
  [0xfd, 0xe7, 0x25],
];

/** Map u in [0,1] (clamped) to a "#rrggbb" viridis color. */
export function colormap(u: number): string {
  const c = Math.min(1, Math.max(0, u)) * (VIRIDIS_STOPS.length - 1);
  const k = Math.min(VIRIDIS_STOPS.length - 2, Math.floor(c));
  const f = c - k;
  const a = VIRIDIS_STOPS[k];
  const b = VIRIDIS_STOPS[k + 1];
  const hex = (lo: number, hi: number) =>
    Math.round(lo + (hi - lo) * f).toString(16).padStart(2, "0");
  return `#${hex(a[0], b[0])}${hex(a[1], b[1])}${hex(a[2], b[2])}`;
}

// ---------------------------------------------------------------------------
// Document assembly
// ---------------------------------------------------------------------------

export interface Frame {
  width: number;
  height: number;
  /** Plot rectangle in pixel coordinates. */
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export function makeFrame(width: number, height: number,
                          margin: { l: number; r: number; t: number; b: number }): Frame {
  return {
    width, height,
    left: margin.l, right: width - margin.r,
    top: margin.t, bottom: height - margin.b,
  };
}

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

/** Accumulates SVG fragments; charts push shapes then call toString(). */
export class SvgDoc {
  private parts: string[] = [];
  readonly frame: Frame;

  constructor(frame: Frame, title: string) {
    this.frame = frame;
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" ` +
      `height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`,
      `<rect width="${frame.width}" height="${frame.height}" fill="white"/>`,
      `<text x="${frame.width / 2}" y="24" text-anchor="middle" ` +
      `font-size="15" ${FONT}>${esc(title)}</text>`,
    );
  }

  push(fragment: string): void {
    this.parts.push(fragment);
  }

  text(x: number, y: number, s: string, opts: { anchor?: string; size?: number;
       rotate?: boolean; color?: string } = {}): void {
    const { anchor = "middle", size = 11, rotate = false, color = "#333" } = opts;
    const tf = rotate ? ` transform="rotate(-90 ${x} ${y})"` : "";
    this.parts.push(
      `<text x="${x}" y="${y}" text-anchor="${anchor}" font-size="${size}" ` +
      `fill="${color}" ${FONT}${tf}>${esc(s)}</text>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" ` +
      `stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5,
           dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    const s = pts.map(([x, y]) => `${round2(x)},${round2(y)}`).join(" ");
    this.parts.push(
      `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${d} ` +
      `points="${s}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${round2(x)}" y="${round2(y)}" width="${round2(w)}" ` +
      `height="${round2(h)}" fill="${fill}"/>`);
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${round2(cx)}" cy="${round2(cy)}" r="${r}" fill="${fill}"/>`);
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

// ---------------------------------------------------------------------------
// Axes
// ---------------------------------------------------------------------------

export interface AxisOpts {
  label: string;
  log?: boolean;
}

/** Draw plot border, ticks, tick labels, and axis labels for both axes. */
export function drawAxes(doc: SvgDoc, xs: Scale, ys: Scale,
                         xOpts: AxisOpts, yOpts: AxisOpts): void {
  const f = doc.frame;
  doc.push(`<rect x="${f.left}" y="${f.top}" width="${f.right - f.left}" ` +
           `height="${f.bottom - f.top}" fill="none" stroke="#333"/>`);

  const xticks = xOpts.log ? decadeTicks(xs.min, xs.max) : niceTicks(xs.min, xs.max);
  for (const v of xticks) {
    const px = xs(v);
    if (px < f.left - 0.5 || px > f.right + 0.5) continue;
    doc.line(px, f.bottom, px, f.bottom + 5, "#333");
    doc.text(px, f.bottom + 18, fmtNum(v));
  }
  const yticks = yOpts.log ? decadeTicks(ys.min, ys.max) : niceTicks(ys.min, ys.max);
  for (const v of yticks) {
    const py = ys(v);
    if (py < f.top - 0.5 || py > f.bottom + 0.5) continue;
    doc.line(f.left - 5, py, f.left, py, "#333");
    doc.text(f.left - 8, py + 4, fmtNum(v), { anchor: "end" });
  }

  doc.text((f.left + f.right) / 2, f.height - 10, xOpts.label, { size: 12 });
  doc.text(16, (f.top + f.bottom) / 2, yOpts.label, { size: 12, rotate: true });
}

/** Vertical colorbar to the right of the plot area. */
export function drawColorbar(doc: SvgDoc, min: number, max: number,
                             label: string): void {
  const f = doc.frame;
  const x = f.right + 18;
  const w = 14;
  const steps = 64;
  const hPix = (f.bottom - f.top) / steps;
  for (let k = 0; k < steps; k++) {
    const u = (k + 0.5) / steps;
    // u=0 at the bottom of the bar
    doc.rect(x, f.bottom - (k + 1) * hPix, w, hPix + 0.5, colormap(u));
  }
  doc.push(`<rect x="${x}" y="${f.top}" width="${w}" ` +
           `height="${f.bottom - f.top}" fill="none" stroke="#333"/>`);
  for (const v of niceTicks(min, max, 5)) {
    const py = f.bottom - ((v - min) / (max - min || 1)) * (f.bottom - f.top);
    if (py < f.top - 0.5 || py > f.bottom + 0.5) continue;
    doc.line(x + w, py, x + w + 4, py, "#333");
    doc.text(x + w + 7, py + 4, fmtNum(v), { anchor: "start" });
  }
  doc.text(x + w / 2, f.top - 8, label, { size: 12 });
}

/** Series palette shared by the line charts. */
export const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#f4a261", "#7b2cbf"];

export function drawLegend(doc: SvgDoc, entries: Array<{ label: string; color: string;
                           dash?: string }>): void {
  const f = doc.frame;
  let y = f.top + 16;
  for (const e of entries) {
    doc.line(f.left + 10, y - 4, f.left + 34, y - 4, e.color, 2, e.dash);
    doc.text(f.left + 40, y, e.label, { anchor: "start" });
    y += 16;
  }
}
