import { describe, expect, it } from "vitest";

import { parseSimCsv, selectSeries, SchemaError, loadSimCsv } from "../src/csv.js";

const HEADER =
  "code_id,esn0_db,frames,source_bits,bit_errors,error_frames,sser,fer," +
  "mean_iters,stop_reason,lift_seed,sim_seed";

describe("parseSimCsv", () => {
  it("parses well-formed rows", () => {
    const text = `${HEADER}\nx,-4.5,10,1000,3,2,0.003,0.2,12.5,error-target,0,7\n`;
    const rows = parseSimCsv(text);
    expect(rows).toHaveLength(1);
    expect(rows[0].esn0_db).toBe(-4.5);
    expect(rows[0].sser).toBeCloseTo(0.003);
    expect(rows[0].stop_reason).toBe("error-target");
  });

  it("rejects missing columns", () => {
    expect(() => parseSimCsv("code_id,esn0_db\nx,1\n")).toThrow(SchemaError);
  });

  it("rejects empty files and non-numeric cells", () => {
    expect(() => parseSimCsv("")).toThrow(SchemaError);
    const bad = `${HEADER}\nx,oops,10,1000,3,2,0.003,0.2,12.5,s,0,7\n`;
    expect(() => parseSimCsv(bad)).toThrow(SchemaError);
  });
});

describe("selectSeries", () => {
  it("filters by code id and sorts by Es/N0", () => {
    const text =
      `${HEADER}\n` +
      `b,-4.0,1,1,0,0,0.1,0.1,1,frames-cap,0,7\n` +
      `a,-4.0,1,1,0,0,0.2,0.1,1,frames-cap,0,7\n` +
      `a,-5.0,1,1,0,0,0.5,0.1,1,frames-cap,0,7\n`;
    const rows = selectSeries(parseSimCsv(text), "a");
    expect(rows.map((r) => r.esn0_db)).toEqual([-5.0, -4.0]);
    expect(rows.every((r) => r.code_id === "a")).toBe(true);
  });
});

describe("fixture sweeps from the simulator CLI", () => {
  it("load and carry a zero-rate row", () => {
    const rows = loadSimCsv(new URL("./fixtures/p04_r1_base_sweep.csv", import.meta.url).pathname);
    expect(rows.length).toBeGreaterThanOrEqual(4);
    expect(rows.some((r) => r.sser === 0)).toBe(true);
  });
});
