/** Orchestration: spec -> loaded series -> figure -> SVG/PNG files. */

import { writeFileSync } from "fs";

import { loadSimCsv, selectSeries, SimRow } from "./csv.js";
import { buildFigure, EmptySeriesError, FigureModel } from "./figure.js";
import { encodePng, rasterize } from "./png.js";
import { PlotSpec } from "./spec.js";
import { renderSvg } from "./svg.js";

export interface RenderResult {
  figure: FigureModel;
  svg?: string;
  png?: Buffer;
  outputs: string[];
}

export function loadSeries(spec: PlotSpec): SimRow[][] {
  return spec.series.map((entry) => {
    const rows = selectSeries(loadSimCsv(entry.csv), entry.code_id);
    if (rows.length === 0) {
      throw new EmptySeriesError(
        `series '${entry.label}': no rows` +
          (entry.code_id ? ` for code_id '${entry.code_id}'` : "") +
          ` in ${entry.csv}`
      );
    }
    return rows;
  });
}

function outputName(out: string, format: "svg" | "png"): string {
  if (out.endsWith(".svg") || out.endsWith(".png")) {
    return out.slice(0, -4) + "." + format;
  }
  return `${out}.${format}`;
}

export function render(spec: PlotSpec): RenderResult {
  const figure = buildFigure(spec, loadSeries(spec));
  const result: RenderResult = { figure, outputs: [] };
  for (const format of spec.formats) {
    const path = outputName(spec.out, format);
    if (format === "svg") {
      result.svg = renderSvg(figure);
      writeFileSync(path, result.svg, "utf-8");
    } else {
      result.png = encodePng(rasterize(figure));
      writeFileSync(path, result.png);
    }
    result.outputs.push(path);
  }
  return result;
}
