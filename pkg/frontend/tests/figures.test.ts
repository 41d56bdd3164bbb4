import { describe, expect, it } from "vitest";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { loadRun, parseManifest, RunData } from "../src/data.js";
import { renderFigures } from "../src/figures.js";

const FIXTURE = join(dirname(fileURLToPath(import.meta.url)), "fixtures", "run");

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("run directory loading", () => {
  const run = loadRun(FIXTURE);

  it("reads the shape from the manifest", () => {
    expect(run.manifest.nCandidates).toBe(6);
    expect(run.manifest.oeTestIds).toEqual([1, 2]);
    expect(run.manifest.tdTestIds).toEqual([1, 2, 3]);
    expect(run.manifest.pointsPerCurve).toBe(run.manifest.nStep + 1);
    expect(run.manifest.bestCandidateId).toBeGreaterThanOrEqual(1);
  });

  it("groups experimental readings into one series per test", () => {
    expect(run.oeData).toHaveLength(2);
    expect(run.tdQData).toHaveLength(3);
    expect(run.tdVData).toHaveLength(3);
    for (const s of [...run.oeData, ...run.tdQData]) {
      expect(s.x.length).toBeGreaterThan(3);
      expect(s.x.length).toBe(s.y.length);
    }
  });

  it("groups simulated curves by candidate, then by test", () => {
    expect(run.oeCurves.size).toBe(6);
    expect(run.tdQCurves.size).toBe(6);
    const best = run.oeCurves.get(run.manifest.bestCandidateId)!;
    expect(best).toHaveLength(2);
    for (const s of best) expect(s.x).toHaveLength(run.manifest.pointsPerCurve);
  });

  it("rejects a manifest with missing keys", () => {
    expect(() => parseManifest("n_candidates = 4\n")).toThrow(/missing key/);
  });
});

describe("figure rendering", () => {
  const run = loadRun(FIXTURE);
  const { svgs, notices } = renderFigures(run);

  it("produces the three standard figures with no notices", () => {
    expect([...svgs.keys()].sort()).toEqual([
      "oe_compression",
      "td_deviatoric",
      "td_volumetric",
    ]);
    expect(notices).toHaveLength(0);
  });

  it("overlays one marker group per test on each figure", () => {
    expect(count(svgs.get("oe_compression")!, "data-test-")).toBe(2);
    expect(count(svgs.get("td_deviatoric")!, "data-test-")).toBe(3);
    expect(count(svgs.get("td_volumetric")!, "data-test-")).toBe(3);
  });

  it("draws the best candidate once per test plus a population envelope", () => {
    const oe = svgs.get("oe_compression")!;
    expect(count(oe, 'class="curve-best"')).toBe(2);
    expect(count(oe, 'class="curve-population"')).toBeGreaterThan(0);
    expect(count(svgs.get("td_deviatoric")!, 'class="curve-best"')).toBe(3);
  });

  it("drops the envelope with bestOnly", () => {
    const { svgs: only } = renderFigures(run, { bestOnly: true });
    const oe = only.get("oe_compression")!;
    expect(count(oe, 'class="curve-best"')).toBe(2);
    expect(count(oe, 'class="curve-population"')).toBe(0);
  });

  it("skips triaxial figures with a notice when the run has no TD tests", () => {
    const noTd: RunData = {
      ...run,
      tdQData: [],
      tdVData: [],
      tdQCurves: new Map(),
      tdVCurves: new Map(),
    };
    const { svgs: partial, notices: notes } = renderFigures(noTd);
    expect([...partial.keys()]).toEqual(["oe_compression"]);
    expect(notes.join(" ")).toMatch(/no triaxial tests/);
  });

  it("emits well-formed standalone SVG", () => {
    for (const svg of svgs.values()) {
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.endsWith("</svg>")).toBe(true);
      expect(svg).toContain('xmlns="http://www.w3.org/2000/svg"');
    }
  });
});
