#!/usr/bin/env node
/**
 * plotkit - batch SVG plots from icap CSV outputs.
 *
 *   plotkit heatmap     --in field.csv --out z.svg [--mix]
 *   plotkit cutline     --in field.csv [--in ref.csv ...] --cut y=0.7 --out cut.svg
 *   plotkit history     --in diagnostics.csv [--in ...] --out hist.svg [--cols a,b]
 *   plotkit convergence --in convergence.csv --out conv.svg [--cols l1,l2]
 *
 * Exit codes: 0 ok, 2 bad arguments or unparseable input.
 */

import { readFile, writeFile } from "node:fs/promises";
import { realpathSync } from "node:fs";
import path from "node:path";
import { parseArgs as nodeParseArgs } from "node:util";
import { fileURLToPath } from "node:url";

import {
  CsvError,
  NORM_COLUMNS,
  NormName,
  parseConvergenceCsv,
  parseDiagnosticsCsv,
  parseFieldCsv,
} from "./csv.js";
import { CutSpec, convergence, cutline, heatmap, history } from "./charts.js";

export type PlotKind = "heatmap" | "cutline" | "history" | "convergence";

export interface PlotJob {
  kind: PlotKind;
  inputs: string[];
  out: string;
  cut?: CutSpec;
  mix?: boolean;
  cols?: string[];
  title?: string;
}

export class UsageError extends Error {}

const KINDS: PlotKind[] = ["heatmap", "cutline", "history", "convergence"];

const USAGE = `usage: plotkit <kind> --in <csv> [--in <csv> ...] --out <svg> [options]

kinds:
  heatmap      one field CSV; --mix plots log10(z(1-z)+1e-10) instead of z
  cutline      field CSVs, overlaid; requires --cut y=<val> | x=<val> | diagonal
  history      diagnostics CSVs, overlaid; --cols <names> (default smearing,max_smearing)
  convergence  one convergence CSV; --cols subset of ${NORM_COLUMNS.join(",")}

options:
  --title <text>   override the default title
  --help           show this message

exit codes: 0 ok, 2 bad arguments or unparseable input
`;

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

export function parseCut(s: string): CutSpec {
  if (s === "diagonal") return { axis: "diagonal" };
  const m = /^([xy])=([-+0-9.eE]+)$/.exec(s);
  const offset = m ? Number(m[2]) : NaN;
  if (!m || Number.isNaN(offset)) {
    throw new UsageError(`bad cut "${s}"; expected y=<val>, x=<val>, or diagonal`);
  }
  return { axis: m[1] as "x" | "y", offset };
}

export function parseJob(argv: string[]): PlotJob | "help" {
  let parsed;
  try {
    parsed = nodeParseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string", multiple: true },
        out: { type: "string" },
        cut: { type: "string" },
        mix: { type: "boolean" },
        cols: { type: "string" },
        title: { type: "string" },
        help: { type: "boolean" },
      },
    });
  } catch (e) {
    throw new UsageError((e as Error).message);
  }
  const { values, positionals } = parsed;
  if (values.help) return "help";

  if (positionals.length !== 1) {
    throw new UsageError(`expected one plot kind, got ${positionals.length}`);
  }
  const kind = positionals[0] as PlotKind;
  if (!KINDS.includes(kind)) {
    throw new UsageError(`unknown kind "${kind}"; pick one of ${KINDS.join(", ")}`);
  }
  const inputs = values.in ?? [];
  if (inputs.length === 0) throw new UsageError("at least one --in is required");
  if (!values.out) throw new UsageError("--out is required");
  if ((kind === "heatmap" || kind === "convergence") && inputs.length > 1) {
    throw new UsageError(`${kind} takes exactly one --in`);
  }

  const job: PlotJob = { kind, inputs, out: values.out };
  if (values.title !== undefined) job.title = values.title;
  if (values.mix) {
    if (kind !== "heatmap") throw new UsageError("--mix only applies to heatmap");
    job.mix = true;
  }
  if (values.cut !== undefined) {
    if (kind !== "cutline") throw new UsageError("--cut only applies to cutline");
    job.cut = parseCut(values.cut);
  } else if (kind === "cutline") {
    throw new UsageError("cutline requires --cut");
  }
  if (values.cols !== undefined) {
    if (kind !== "history" && kind !== "convergence") {
      throw new UsageError("--cols only applies to history and convergence");
    }
    job.cols = values.cols.split(",").map((c) => c.trim()).filter((c) => c !== "");
    if (job.cols.length === 0) throw new UsageError("--cols is empty");
  }
  return job;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

async function readInput(p: string): Promise<string> {
  try {
    return await readFile(p, "utf-8");
  } catch (e) {
    throw new UsageError(`cannot read ${p}: ${(e as NodeJS.ErrnoException).code}`);
  }
}

function stems(paths: string[]): string[] {
  return paths.map((p) => path.basename(p, path.extname(p)));
}

/** Build the requested chart and write the SVG to job.out. */
export async function render(job: PlotJob): Promise<void> {
  const texts = await Promise.all(job.inputs.map(readInput));
  let svg: string;
  switch (job.kind) {
    case "heatmap": {
      const field = parseFieldCsv(texts[0], job.inputs[0]);
      svg = heatmap(field, { mix: job.mix, title: job.title });
      break;
    }
    case "cutline": {
      const fields = texts.map((t, k) => parseFieldCsv(t, job.inputs[k]));
      svg = cutline(fields, job.cut!, { title: job.title, labels: stems(job.inputs) });
      break;
    }
    case "history": {
      const runs = texts.map((t, k) => parseDiagnosticsCsv(t, job.inputs[k]));
      svg = history(runs, { cols: job.cols, title: job.title,
                            labels: stems(job.inputs) });
      break;
    }
    case "convergence": {
      const data = parseConvergenceCsv(texts[0], job.inputs[0]);
      const cols = job.cols?.map((c) => {
        if (!(NORM_COLUMNS as readonly string[]).includes(c)) {
          throw new UsageError(`unknown norm "${c}"; pick from ${NORM_COLUMNS.join(",")}`);
        }
        return c as NormName;
      });
      svg = convergence(data, { cols, title: job.title });
      break;
    }
  }
  await writeFile(job.out, svg);
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

export async function main(argv: string[]): Promise<number> {
  let job: PlotJob | "help";
  try {
    job = parseJob(argv);
  } catch (e) {
    if (e instanceof UsageError) {
      process.stderr.write(`error: ${e.message}\n\n${USAGE}`);
      return 2;
    }
    throw e;
  }
  if (job === "help") {
    process.stdout.write(USAGE);
    return 0;
  }
  try {
    await render(job);
  } catch (e) {
    if (e instanceof CsvError) {
      process.stderr.write(`parse error: ${e.message}\n`);
      return 2;
    }
    if (e instanceof UsageError || e instanceof Error) {
      process.stderr.write(`error: ${(e as Error).message}\n`);
      return 2;
    }
    throw e;
  }
  return 0;
}

function isEntry(): boolean {
  if (!process.argv[1]) return false;
  try {
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
}

if (isEntry()) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
