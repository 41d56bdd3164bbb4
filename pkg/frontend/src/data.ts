/**
 * Readers for the file outputs of a calibration run directory.
 *
 * Shapes (candidate count, points per curve, test-ID lists) come from
 * manifest.txt; the CSVs are only trusted to match it.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import Papa from "papaparse";

export interface Manifest {
  nCandidates: number;
  nStep: number;
  pointsPerCurve: number;
  bestCandidateId: number;
  bestCost: number;
  oeTestIds: number[];
  tdTestIds: number[];
  raw: Record<string, string>;
}

/** One plottable polyline or scatter: x/y pairs of a single test. */
export interface Series {
  testId: number;
  x: number[];
  y: number[];
}

export interface RunData {
  manifest: Manifest;
  /** experimental readings, one series per test */
  oeData: Series[]; // x = sigma_v [MPa], y = e
  tdQData: Series[]; // x = eps_a [%], y = q [MPa]
  tdVData: Series[]; // x = eps_a [%], y = eps_v [%]
  /** simulated curves keyed by candidate ID, one series per test each */
  oeCurves: Map<number, Series[]>;
  tdQCurves: Map<number, Series[]>;
  tdVCurves: Map<number, Series[]>;
}

export function parseManifest(text: string): Manifest {
  const raw: Record<string, string> = {};
  for (const line of text.split("\n")) {
    const body = line.split("#")[0];
    const eq = body.indexOf("=");
    if (eq < 0) continue;
    raw[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
  }
  const num = (key: string): number => {
    if (!(key in raw)) throw new Error(`manifest.txt: missing key '${key}'`);
    const v = Number(raw[key]);
    if (Number.isNaN(v)) throw new Error(`manifest.txt: bad value for '${key}'`);
    return v;
  };
  const ids = (key: string): number[] =>
    (raw[key] ?? "").split(/\s+/).filter((s) => s.length > 0).map(Number);
  return {
    nCandidates: num("n_candidates"),
    nStep: num("n_step"),
    pointsPerCurve: num("points_per_full_curve"),
    bestCandidateId: num("best_candidate_id"),
    bestCost: num("best_cost"),
    oeTestIds: ids("oe_test_ids"),
    tdTestIds: ids("td_test_ids"),
    raw,
  };
}

interface CsvRow {
  [column: string]: number;
}

function readCsv(path: string): CsvRow[] {
  const parsed = Papa.parse<CsvRow>(readFileSync(path, "utf8").trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`${path}: ${parsed.errors[0].message}`);
  }
  return parsed.data;
}

/** Group rows by test ID into one series per test, preserving row order. */
function toSeries(rows: CsvRow[], xCol: string, yCol: string): Series[] {
  const byTest = new Map<number, Series>();
  for (const row of rows) {
    let s = byTest.get(row.test_id);
    if (!s) {
      s = { testId: row.test_id, x: [], y: [] };
      byTest.set(row.test_id, s);
    }
    s.x.push(row[xCol]);
    s.y.push(row[yCol]);
  }
  return [...byTest.values()];
}

/** Same, but first split by candidate; NaN rows (truncated curves) kept. */
function toCandidateSeries(
  rows: CsvRow[],
  xCol: string,
  yCol: string,
): Map<number, Series[]> {
  const byCandidate = new Map<number, CsvRow[]>();
  for (const row of rows) {
    const bucket = byCandidate.get(row.candidate_id);
    if (bucket) bucket.push(row);
    else byCandidate.set(row.candidate_id, [row]);
  }
  const out = new Map<number, Series[]>();
  for (const [cid, cRows] of byCandidate) out.set(cid, toSeries(cRows, xCol, yCol));
  return out;
}

export function loadRun(runDir: string): RunData {
  const manifest = parseManifest(readFileSync(join(runDir, "manifest.txt"), "utf8"));
  const xOe = readCsv(join(runDir, "X_OE.csv"));
  const xTd = readCsv(join(runDir, "X_TD.csv"));
  const hxOe = readCsv(join(runDir, "HX_OE.csv"));
  const hxTd = readCsv(join(runDir, "HX_TD.csv"));
  for (const [name, rows] of [
    ["X_OE.csv", xOe],
    ["X_TD.csv", xTd],
    ["HX_OE.csv", hxOe],
    ["HX_TD.csv", hxTd],
  ] as const) {
    const expected = Number(manifest.raw[`rows[${name}]`]);
    if (rows.length !== expected) {
      throw new Error(`${name}: ${rows.length} rows, manifest says ${expected}`);
    }
  }
  return {
    manifest,
    oeData: toSeries(xOe, "sigma_v_MPa", "e"),
    tdQData: toSeries(xTd, "eps_a_pct", "q_MPa"),
    tdVData: toSeries(xTd, "eps_a_pct", "eps_v_pct"),
    oeCurves: toCandidateSeries(hxOe, "sigma_v_MPa", "e"),
    tdQCurves: toCandidateSeries(hxTd, "eps_a_pct", "q_MPa"),
    tdVCurves: toCandidateSeries(hxTd, "eps_a_pct", "eps_v_pct"),
  };
}
