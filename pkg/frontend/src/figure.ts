/**
 * Geometry shared by the SVG and PNG backends: scales, ticks, polylines,
 * markers, the capacity-limit rule, and legend layout, all in pixel space.
 */

import { SimRow } from "./csv.js";
import { PlotSpec } from "./spec.js";

export interface Point {
  xDb: number;
  sser: number;
  x: number;
  y: number;
  clamped: boolean; // zero-rate point drawn at the floor
}

export interface Series {
  label: string;
  color: string;
  marker: "circle" | "square" | "triangle" | "diamond";
  points: Point[];
}

export interface Tick {
  pos: number;
  label: string;
}

export interface FigureModel {
  width: number;
  height: number;
  box: { x0: number; y0: number; x1: number; y1: number };
  xDomain: [number, number];
  yDomain: [number, number];
  xTicks: Tick[];
  yTicks: Tick[];
  series: Series[];
  shannon?: { x: number; db: number };
  title?: string;
  xLabel: string;
  yLabel: string;
}

export class EmptySeriesError extends Error {}

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARKERS: Series["marker"][] = ["circle", "square", "triangle", "diamond"];

export function buildFigure(spec: PlotSpec, rows: SimRow[][]): FigureModel {
  const width = 760;
  const height = 540;
  const box = { x0: 90, y0: 60, x1: width - 30, y1: height - 70 };
  const [yLo, yHi] = spec.y_range;

  let xMin = Infinity;
  let xMax = -Infinity;
  rows.forEach((series, i) => {
    if (series.length === 0) {
      throw new EmptySeriesError(`series '${spec.series[i].label}' has no rows`);
    }
    for (const row of series) {
      xMin = Math.min(xMin, row.esn0_db);
      xMax = Math.max(xMax, row.esn0_db);
    }
  });
  if (spec.shannon_db !== undefined) {
    xMin = Math.min(xMin, spec.shannon_db);
    xMax = Math.max(xMax, spec.shannon_db);
  }
  const pad = Math.max(0.25, 0.05 * (xMax - xMin));
  xMin -= pad;
  xMax += pad;

  const xScale = (db: number) =>
    box.x0 + ((db - xMin) / (xMax - xMin)) * (box.x1 - box.x0);
  const yScale = (value: number) => {
    const v = Math.min(Math.max(value, yLo), yHi);
    const t = (Math.log10(v) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo));
    return box.y1 - t * (box.y1 - box.y0);
  };

  const xTicks: Tick[] = [];
  const step = niceStep(xMax - xMin);
  for (let v = Math.ceil(xMin / step) * step; v <= xMax + 1e-9; v += step) {
    xTicks.push({ pos: xScale(v), label: formatDb(v) });
  }
  const yTicks: Tick[] = [];
  for (let e = Math.ceil(Math.log10(yLo)); e <= Math.floor(Math.log10(yHi)); e++) {
    yTicks.push({ pos: yScale(10 ** e), label: `1e${e}` });
  }

  const series: Series[] = rows.map((data, i) => ({
    label: spec.series[i].label,
    color: COLORS[i % COLORS.length],
    marker: MARKERS[i % MARKERS.length],
    points: data.map((row) => ({
      xDb: row.esn0_db,
      sser: row.sser,
      x: xScale(row.esn0_db),
      y: yScale(row.sser > 0 ? row.sser : yLo),
      clamped: row.sser <= 0,
    })),
  }));

  return {
    width,
    height,
    box,
    xDomain: [xMin, xMax],
    yDomain: [yLo, yHi],
    xTicks,
    yTicks,
    series,
    shannon:
      spec.shannon_db === undefined
        ? undefined
        : { x: xScale(spec.shannon_db), db: spec.shannon_db },
    title: spec.title,
    xLabel: spec.x_label,
    yLabel: "SSER",
  };
}

function niceStep(span: number): number {
  const raw = span / 8;
  const mag = 10 ** Math.floor(Math.log10(raw));
  for (const mult of [1, 2, 2.5, 5, 10]) {
    if (raw <= mult * mag) return mult * mag;
  }
  return 10 * mag;
}

function formatDb(v: number): string {
  const rounded = Math.round(v * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}
