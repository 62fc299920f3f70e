/**
 * Reader for simulation result CSVs.
 *
 * Expected schema (one row per simulated Es/N0 point):
 *   code_id, esn0_db, frames, source_bits, bit_errors, error_frames,
 *   sser, fer, mean_iters, stop_reason, lift_seed, sim_seed
 */

import { readFileSync } from "fs";

export interface SimRow {
  code_id: string;
  esn0_db: number;
  frames: number;
  source_bits: number;
  bit_errors: number;
  error_frames: number;
  sser: number;
  fer: number;
  mean_iters: number;
  stop_reason: string;
  lift_seed: number;
  sim_seed: number;
}

export const REQUIRED_COLUMNS = [
  "code_id", "esn0_db", "frames", "source_bits", "bit_errors", "error_frames",
  "sser", "fer", "mean_iters", "stop_reason", "lift_seed", "sim_seed",
] as const;

export class SchemaError extends Error {}

export function parseSimCsv(text: string, source = "<string>"): SimRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty CSV`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (const column of REQUIRED_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(`${source}: missing column '${column}'`);
    }
  }
  const index = new Map(header.map((name, i) => [name, i]));
  const rows: SimRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const cell = (name: string) => cells[index.get(name)!]?.trim() ?? "";
    const num = (name: string) => {
      const value = Number(cell(name));
      if (!Number.isFinite(value)) {
        throw new SchemaError(`${source}: non-numeric '${name}' in row: ${line}`);
      }
      return value;
    };
    rows.push({
      code_id: cell("code_id"),
      esn0_db: num("esn0_db"),
      frames: num("frames"),
      source_bits: num("source_bits"),
      bit_errors: num("bit_errors"),
      error_frames: num("error_frames"),
      sser: num("sser"),
      fer: num("fer"),
      mean_iters: num("mean_iters"),
      stop_reason: cell("stop_reason"),
      lift_seed: num("lift_seed"),
      sim_seed: num("sim_seed"),
    });
  }
  return rows;
}

export function loadSimCsv(path: string): SimRow[] {
  return parseSimCsv(readFileSync(path, "utf-8"), path);
}

/** Rows of one code id, sorted by Es/N0. */
export function selectSeries(rows: SimRow[], codeId?: string): SimRow[] {
  const picked = codeId ? rows.filter((r) => r.code_id === codeId) : rows.slice();
  picked.sort((a, b) => a.esn0_db - b.esn0_db);
  return picked;
}
