/**
 * Minimal PNG backend: rasterizes the figure primitives onto an RGB buffer
 * and encodes it with zlib (no native canvas dependency).  Text uses a
 * small built-in 5x7 bitmap font, sufficient for tick values and labels.
 */

import { deflateSync } from "zlib";

import { FigureModel, Series } from "./figure.js";

type RGB = [number, number, number];

export class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, [r, g, b]: RGB): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const o = (yi * this.width + xi) * 3;
    this.data[o] = r;
    this.data[o + 1] = g;
    this.data[o + 2] = b;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: RGB, thick = 1): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      for (let ox = 0; ox < thick; ox++) {
        for (let oy = 0; oy < thick; oy++) {
          this.set(xa + ox, ya + oy, color);
        }
      }
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  dashedVLine(x: number, y0: number, y1: number, color: RGB): void {
    for (let y = Math.min(y0, y1); y <= Math.max(y0, y1); y++) {
      if (Math.floor(y / 5) % 2 === 0) this.set(x, y, color);
    }
  }

  fillRect(x: number, y: number, w: number, h: number, color: RGB): void {
    for (let yy = y; yy < y + h; yy++) {
      for (let xx = x; xx < x + w; xx++) this.set(xx, yy, color);
    }
  }
}

// 5x7 bitmap font: rows of 5 bits, MSB left
const FONT: Record<string, number[]> = {
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  "-": [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  "+": [0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00],
  ".": [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  "/": [0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10],
  "(": [0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02],
  ")": [0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08],
  " ": [0, 0, 0, 0, 0, 0, 0],
  e: [0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
  E: [0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f],
  S: [0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e],
  R: [0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11],
  N: [0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11],
  d: [0x01, 0x01, 0x0d, 0x13, 0x11, 0x13, 0x0d],
  B: [0x1e, 0x11, 0x11, 0x1e, 0x11, 0x11, 0x1e],
  s: [0x00, 0x00, 0x0f, 0x10, 0x0e, 0x01, 0x1e],
  l: [0x0c, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e],
  i: [0x04, 0x00, 0x0c, 0x04, 0x04, 0x04, 0x0e],
  m: [0x00, 0x00, 0x1a, 0x15, 0x15, 0x15, 0x15],
  t: [0x08, 0x08, 0x1e, 0x08, 0x08, 0x09, 0x06],
};

export function drawText(raster: Raster, x: number, y: number, text: string, color: RGB): void {
  let cx = Math.round(x);
  for (const ch of text) {
    const glyph = FONT[ch] ?? FONT[ch.toUpperCase()] ?? FONT[" "];
    for (let row = 0; row < 7; row++) {
      for (let col = 0; col < 5; col++) {
        if ((glyph[row] >> (4 - col)) & 1) raster.set(cx + col, y + row, color);
      }
    }
    cx += 6;
  }
}

function hexColor(hex: string): RGB {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

function drawMarker(raster: Raster, series: Series, x: number, y: number, clamped: boolean): void {
  const color = hexColor(series.color);
  const bg: RGB = [255, 255, 255];
  switch (series.marker) {
    case "circle":
      for (let dx = -3; dx <= 3; dx++)
        for (let dy = -3; dy <= 3; dy++)
          if (dx * dx + dy * dy <= 9) raster.set(x + dx, y + dy, color);
      if (clamped) raster.fillRect(Math.round(x) - 1, Math.round(y) - 1, 3, 3, bg);
      break;
    case "square":
      raster.fillRect(Math.round(x) - 3, Math.round(y) - 3, 7, 7, color);
      if (clamped) raster.fillRect(Math.round(x) - 1, Math.round(y) - 1, 3, 3, bg);
      break;
    case "triangle":
      for (let dy = -3; dy <= 3; dy++) {
        const half = Math.round(((dy + 3) / 6) * 4);
        for (let dx = -half; dx <= half; dx++) raster.set(x + dx, y + dy, color);
      }
      break;
    case "diamond":
      for (let dy = -4; dy <= 4; dy++) {
        const half = 4 - Math.abs(dy);
        for (let dx = -half; dx <= half; dx++) raster.set(x + dx, y + dy, color);
      }
      break;
  }
}

export function rasterize(fig: FigureModel): Raster {
  const raster = new Raster(fig.width, fig.height);
  const ink: RGB = [40, 40, 40];
  const grid: RGB = [221, 221, 221];
  const { box } = fig;

  for (const tick of fig.yTicks) {
    raster.line(box.x0, tick.pos, box.x1, tick.pos, grid);
    drawText(raster, box.x0 - 8 - 6 * tick.label.length, tick.pos - 3, tick.label, ink);
  }
  for (const tick of fig.xTicks) {
    raster.line(tick.pos, box.y1, tick.pos, box.y1 + 5, ink);
    drawText(raster, tick.pos - 3 * tick.label.length, box.y1 + 10, tick.label, ink);
  }
  raster.line(box.x0, box.y0, box.x1, box.y0, ink);
  raster.line(box.x0, box.y1, box.x1, box.y1, ink);
  raster.line(box.x0, box.y0, box.x0, box.y1, ink);
  raster.line(box.x1, box.y0, box.x1, box.y1, ink);

  if (fig.shannon) {
    raster.dashedVLine(fig.shannon.x, box.y0, box.y1, [85, 85, 85]);
    drawText(raster, fig.shannon.x + 5, box.y0 + 6, `limit ${fig.shannon.db} dB`, [85, 85, 85]);
  }

  for (const series of fig.series) {
    const color = hexColor(series.color);
    for (let i = 1; i < series.points.length; i++) {
      raster.line(
        series.points[i - 1].x, series.points[i - 1].y,
        series.points[i].x, series.points[i].y, color, 2
      );
    }
    for (const p of series.points) drawMarker(raster, series, p.x, p.y, p.clamped);
  }

  if (fig.title) {
    drawText(raster, (box.x0 + box.x1) / 2 - 3 * fig.title.length, 20, fig.title, ink);
  }
  drawText(raster, (box.x0 + box.x1) / 2 - 3 * fig.xLabel.length, fig.height - 30, fig.xLabel, ink);
  drawText(raster, 10, (box.y0 + box.y1) / 2, fig.yLabel, ink);

  const legendX = box.x1 - 190;
  let legendY = box.y0 + 8;
  for (const series of fig.series) {
    raster.line(legendX, legendY + 3, legendX + 26, legendY + 3, hexColor(series.color), 2);
    drawText(raster, legendX + 34, legendY, series.label, ink);
    legendY += 20;
  }
  return raster;
}

// --- PNG container ------------------------------------------------------------

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(data: Uint8Array): number {
  let crc = 0xffffffff;
  for (const byte of data) crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + payload.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, payload.length);
  for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
  out.set(payload, 8);
  view.setUint32(8 + payload.length, crc32(out.subarray(4, 8 + payload.length)));
  return out;
}

export function encodePng(raster: Raster): Buffer {
  const { width, height, data } = raster;
  const ihdr = new Uint8Array(13);
  const view = new DataView(ihdr.buffer);
  view.setUint32(0, width);
  view.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // color type: truecolor
  const scanlines = new Uint8Array(height * (1 + width * 3));
  for (let y = 0; y < height; y++) {
    const o = y * (1 + width * 3);
    scanlines[o] = 0; // filter: none
    scanlines.set(data.subarray(y * width * 3, (y + 1) * width * 3), o + 1);
  }
  const idat = deflateSync(scanlines);
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", new Uint8Array(idat)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}
