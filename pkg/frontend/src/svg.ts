/** Serialize a figure model to standalone SVG markup. */

import { FigureModel, Series } from "./figure.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function marker(series: Series, x: number, y: number, clamped: boolean): string {
  const c = series.color;
  const style = clamped
    ? `fill="white" stroke="${c}" stroke-width="1.5" class="marker clamped"`
    : `fill="${c}" class="marker"`;
  switch (series.marker) {
    case "circle":
      return `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="4" ${style}/>`;
    case "square":
      return `<rect x="${(x - 3.5).toFixed(1)}" y="${(y - 3.5).toFixed(1)}" width="7" height="7" ${style}/>`;
    case "triangle":
      return `<polygon points="${x},${y - 4.5} ${x - 4},${y + 3.5} ${x + 4},${y + 3.5}" ${style}/>`;
    case "diamond":
      return `<polygon points="${x},${y - 5} ${x - 4},${y} ${x},${y + 5} ${x + 4},${y}" ${style}/>`;
  }
}

export function renderSvg(fig: FigureModel): string {
  const { box } = fig;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fig.width}" height="${fig.height}" ` +
      `viewBox="0 0 ${fig.width} ${fig.height}" data-x-min="${fig.xDomain[0]}" ` +
      `data-x-max="${fig.xDomain[1]}" data-y-min="${fig.yDomain[0]}" data-y-max="${fig.yDomain[1]}">`
  );
  parts.push(`<rect width="${fig.width}" height="${fig.height}" fill="white"/>`);
  if (fig.title) {
    parts.push(
      `<text x="${(box.x0 + box.x1) / 2}" y="32" text-anchor="middle" ` +
        `font-size="16" font-family="sans-serif" class="title">${esc(fig.title)}</text>`
    );
  }

  // gridlines and ticks
  for (const tick of fig.yTicks) {
    parts.push(
      `<line x1="${box.x0}" y1="${tick.pos.toFixed(1)}" x2="${box.x1}" ` +
        `y2="${tick.pos.toFixed(1)}" stroke="#dddddd" class="grid"/>`
    );
    parts.push(
      `<text x="${box.x0 - 8}" y="${(tick.pos + 4).toFixed(1)}" text-anchor="end" ` +
        `font-size="12" font-family="sans-serif" class="ytick">${esc(tick.label)}</text>`
    );
  }
  for (const tick of fig.xTicks) {
    parts.push(
      `<line x1="${tick.pos.toFixed(1)}" y1="${box.y1}" x2="${tick.pos.toFixed(1)}" ` +
        `y2="${box.y1 + 5}" stroke="#333333" class="xtick-mark"/>`
    );
    parts.push(
      `<text x="${tick.pos.toFixed(1)}" y="${box.y1 + 20}" text-anchor="middle" ` +
        `font-size="12" font-family="sans-serif" class="xtick">${esc(tick.label)}</text>`
    );
  }

  // plot frame
  parts.push(
    `<rect x="${box.x0}" y="${box.y0}" width="${box.x1 - box.x0}" ` +
      `height="${box.y1 - box.y0}" fill="none" stroke="#333333" class="frame"/>`
  );

  // capacity-limit rule
  if (fig.shannon) {
    parts.push(
      `<line x1="${fig.shannon.x.toFixed(1)}" y1="${box.y0}" x2="${fig.shannon.x.toFixed(1)}" ` +
        `y2="${box.y1}" stroke="#555555" stroke-dasharray="6,4" class="shannon" ` +
        `data-x-db="${fig.shannon.db}"/>`
    );
    parts.push(
      `<text x="${(fig.shannon.x + 5).toFixed(1)}" y="${box.y0 + 14}" font-size="11" ` +
        `font-family="sans-serif" fill="#555555" class="shannon-label">` +
        `limit ${fig.shannon.db} dB</text>`
    );
  }

  // series
  for (const series of fig.series) {
    const pts = series.points.map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${series.color}" stroke-width="1.8" ` +
        `class="series" data-label="${esc(series.label)}"/>`
    );
    for (const p of series.points) {
      parts.push(marker(series, p.x, p.y, p.clamped));
      if (p.clamped) {
        parts.push(
          `<text x="${p.x.toFixed(1)}" y="${(p.y - 8).toFixed(1)}" text-anchor="middle" ` +
            `font-size="10" fill="${series.color}" class="clamped-note">0</text>`
        );
      }
    }
  }

  // axis labels
  parts.push(
    `<text x="${(box.x0 + box.x1) / 2}" y="${fig.height - 28}" text-anchor="middle" ` +
      `font-size="13" font-family="sans-serif" class="xlabel">${esc(fig.xLabel)}</text>`
  );
  parts.push(
    `<text x="24" y="${(box.y0 + box.y1) / 2}" text-anchor="middle" font-size="13" ` +
      `font-family="sans-serif" class="ylabel" transform="rotate(-90 24 ${(box.y0 + box.y1) / 2})">` +
      `${esc(fig.yLabel)}</text>`
  );

  // legend
  const legendX = box.x1 - 190;
  let legendY = box.y0 + 12;
  parts.push(`<g class="legend">`);
  for (const series of fig.series) {
    parts.push(
      `<line x1="${legendX}" y1="${legendY}" x2="${legendX + 26}" y2="${legendY}" ` +
        `stroke="${series.color}" stroke-width="1.8"/>`
    );
    parts.push(marker(series, legendX + 13, legendY, false));
    parts.push(
      `<text x="${legendX + 34}" y="${legendY + 4}" font-size="12" ` +
        `font-family="sans-serif" class="legend-label">${esc(series.label)}</text>`
    );
    legendY += 20;
  }
  parts.push(`</g>`);
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}
