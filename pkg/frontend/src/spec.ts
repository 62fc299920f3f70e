/**
 * Plot specification: which CSV series to draw and how.
 *
 * JSON shape:
 * {
 *   "series": [{"csv": "sweep.csv", "code_id": "p04_r1_opt", "label": "optimized"}],
 *   "y_range": [1e-7, 1.0],
 *   "shannon_db": -7.0,
 *   "title": "...",            // optional
 *   "x_label": "Es/N0 (dB)",   // optional
 *   "out": "figure",           // output basename (or path ending in .svg/.png)
 *   "formats": ["svg", "png"]  // optional, default both
 * }
 */

import { readFileSync } from "fs";

export interface SeriesSpec {
  csv: string;
  code_id?: string;
  label: string;
}

export interface PlotSpec {
  series: SeriesSpec[];
  y_range: [number, number];
  shannon_db?: number;
  title?: string;
  x_label: string;
  out: string;
  formats: ("svg" | "png")[];
}

export class SpecError extends Error {}

export function validateSpec(raw: unknown): PlotSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new SpecError("spec must be a JSON object");
  }
  const doc = raw as Record<string, unknown>;
  const series = doc.series;
  if (!Array.isArray(series) || series.length === 0) {
    throw new SpecError("spec.series must be a non-empty array");
  }
  const parsedSeries: SeriesSpec[] = series.map((entry, i) => {
    const e = entry as Record<string, unknown>;
    if (typeof e.csv !== "string" || typeof e.label !== "string") {
      throw new SpecError(`spec.series[${i}] needs string 'csv' and 'label'`);
    }
    return {
      csv: e.csv,
      label: e.label,
      code_id: typeof e.code_id === "string" ? e.code_id : undefined,
    };
  });
  const yRange = doc.y_range;
  if (
    !Array.isArray(yRange) ||
    yRange.length !== 2 ||
    typeof yRange[0] !== "number" ||
    typeof yRange[1] !== "number" ||
    yRange[0] <= 0 ||
    yRange[1] <= 0 ||
    yRange[0] >= yRange[1]
  ) {
    throw new SpecError("spec.y_range must be [low, high] with 0 < low < high");
  }
  const formats = (doc.formats as string[] | undefined) ?? ["svg", "png"];
  for (const f of formats) {
    if (f !== "svg" && f !== "png") {
      throw new SpecError(`unknown output format '${f}'`);
    }
  }
  if (typeof doc.out !== "string" || doc.out.length === 0) {
    throw new SpecError("spec.out must name the output file");
  }
  return {
    series: parsedSeries,
    y_range: [yRange[0], yRange[1]],
    shannon_db: typeof doc.shannon_db === "number" ? doc.shannon_db : undefined,
    title: typeof doc.title === "string" ? doc.title : undefined,
    x_label: typeof doc.x_label === "string" ? doc.x_label : "Es/N0 (dB)",
    out: doc.out,
    formats: formats as ("svg" | "png")[],
  };
}

export function loadSpec(path: string): PlotSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new SpecError(`cannot read spec ${path}: ${(err as Error).message}`);
  }
  return validateSpec(raw);
}
