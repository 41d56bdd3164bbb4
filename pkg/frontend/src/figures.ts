/**
 * The three standard calibration figures: compression plane (OE),
 * deviatoric response and volumetric response (TD). Experimental
 * readings are drawn as markers, the best candidate as a bold curve and
 * (unless bestOnly) the rest of the final population as a faint
 * envelope behind it.
 */

import { RunData, Series } from "./data.js";
import { Figure } from "./svg.js";

export interface RenderOptions {
  bestOnly?: boolean;
}

export interface RenderedFigures {
  /** file stem -> SVG document */
  svgs: Map<string, string>;
  /** notes for figures skipped because the run has no data for them */
  notices: string[];
}

const DATA_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"];
const POPULATION_STROKE = "#999999";
const BEST_STROKE = "#000000";

function populationFirst(curves: Map<number, Series[]>, bestId: number): number[] {
  // draw order: population first, best last so it stays on top
  const ids = [...curves.keys()].filter((id) => id !== bestId).sort((a, b) => a - b);
  if (curves.has(bestId)) ids.push(bestId);
  return ids;
}

function buildFigure(
  title: string,
  xLabel: string,
  yLabel: string,
  logX: boolean,
  data: Series[],
  curves: Map<number, Series[]>,
  bestId: number,
  bestOnly: boolean,
): Figure {
  const fig = new Figure(
    title,
    { label: xLabel, kind: logX ? "log" : "linear" },
    { label: yLabel, kind: "linear" },
  );
  for (const cid of populationFirst(curves, bestId)) {
    const isBest = cid === bestId;
    if (!isBest && bestOnly) continue;
    for (const series of curves.get(cid) ?? []) {
      fig.addLine({
        series,
        stroke: isBest ? BEST_STROKE : POPULATION_STROKE,
        width: isBest ? 2.2 : 0.8,
        opacity: isBest ? 1.0 : 0.25,
        cssClass: isBest ? "curve-best" : "curve-population",
      });
    }
  }
  data.forEach((series, i) => {
    fig.addMarkers({
      series,
      fill: DATA_COLORS[i % DATA_COLORS.length],
      cssClass: `data-test-${series.testId}`,
    });
  });
  return fig;
}

export function renderFigures(run: RunData, options: RenderOptions = {}): RenderedFigures {
  const bestOnly = options.bestOnly ?? false;
  const bestId = run.manifest.bestCandidateId;
  const svgs = new Map<string, string>();
  const notices: string[] = [];

  if (run.oeData.length > 0) {
    svgs.set(
      "oe_compression",
      buildFigure(
        "Oedometric compression",
        "vertical stress [MPa]",
        "void ratio [-]",
        true,
        run.oeData,
        run.oeCurves,
        bestId,
        bestOnly,
      ).render(),
    );
  } else {
    notices.push("no oedometer tests in this run; skipping oe_compression");
  }

  if (run.tdQData.length > 0) {
    svgs.set(
      "td_deviatoric",
      buildFigure(
        "Triaxial drained: deviatoric response",
        "axial strain [%]",
        "deviatoric stress q [MPa]",
        false,
        run.tdQData,
        run.tdQCurves,
        bestId,
        bestOnly,
      ).render(),
    );
    svgs.set(
      "td_volumetric",
      buildFigure(
        "Triaxial drained: volumetric response",
        "axial strain [%]",
        "volumetric strain [%]",
        false,
        run.tdVData,
        run.tdVCurves,
        bestId,
        bestOnly,
      ).render(),
    );
  } else {
    notices.push("no triaxial tests in this run; skipping td_deviatoric and td_volumetric");
  }
  return { svgs, notices };
}
