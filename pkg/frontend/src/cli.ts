#!/usr/bin/env node
/**
 * Render the standard figures of a calibration run directory.
 *
 *   sandcal-plots RUN_DIR [--out DIR] [--best-only] [--format svg]
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { loadRun } from "./data.js";
import { renderFigures } from "./figures.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("$0 <run-dir>", "render calibration figures from a run directory")
    .positional("run-dir", { type: "string", demandOption: true })
    .option("out", {
      type: "string",
      describe: "output directory (default: the run directory)",
    })
    .option("best-only", {
      type: "boolean",
      default: false,
      describe: "draw only the best candidate, no population envelope",
    })
    .option("format", {
      type: "string",
      default: "svg",
      choices: ["svg"] as const,
      describe: "output format",
    })
    .strict()
    .parseSync();

  const runDir = args["run-dir"] as string;
  const outDir = args.out ?? runDir;
  let rendered;
  try {
    rendered = renderFigures(loadRun(runDir), { bestOnly: args["best-only"] });
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  mkdirSync(outDir, { recursive: true });
  for (const [stem, svg] of rendered.svgs) {
    const path = join(outDir, `${stem}.${args.format}`);
    writeFileSync(path, svg);
    console.log(`wrote ${path}`);
  }
  for (const note of rendered.notices) console.log(note);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(hideBin(process.argv)));
}
