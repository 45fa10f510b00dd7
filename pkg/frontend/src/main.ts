#!/usr/bin/env node
/**
 * CLI: render figures from vortexlab CSV outputs.
 *
 *   vortexlab-plots trajectories --input trajectory.csv --output fig.svg
 *   vortexlab-plots patches --input snapshot.csv [--overlay trajectory.csv] --output fig.svg
 *   vortexlab-plots timeseries --input diagnostics.csv --columns support1,I2_1 \
 *       [--loglog] --output fig.svg
 *   vortexlab-plots --spec figure.json     (same fields as flags)
 *
 * Exit codes: 0 ok, 2 bad arguments or schema violation, 4 missing input.
 */

import { readFileSync, writeFileSync, existsSync } from "node:fs";
import { parseSnapshot, parseTable, parseTrajectory, SchemaError } from "./csv.js";
import {
  FigureOptions,
  renderPatches,
  renderTimeseries,
  renderTrajectories,
  SeriesPanel,
} from "./figures.js";

interface Spec {
  kind: string;
  input: string;
  output: string;
  overlay?: string;
  columns?: string[];
  loglog?: boolean;
  width?: number;
  height?: number;
  timeRange?: [number, number];
}

function parseArgs(argv: string[]): Spec {
  if (argv[0] === "--spec") {
    if (argv.length !== 2) throw new UsageError("--spec takes exactly one JSON path");
    const spec = JSON.parse(readInput(argv[1])) as Spec;
    if (!spec.kind || !spec.input || !spec.output) {
      throw new UsageError("spec needs kind, input, output");
    }
    return spec;
  }
  const kind = argv[0];
  const spec: Spec = { kind, input: "", output: "" };
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${arg} needs a value`);
      return argv[++i];
    };
    switch (arg) {
      case "--input": spec.input = next(); break;
      case "--output": spec.output = next(); break;
      case "--overlay": spec.overlay = next(); break;
      case "--columns": spec.columns = next().split(","); break;
      case "--loglog": spec.loglog = true; break;
      case "--width": spec.width = Number(next()); break;
      case "--height": spec.height = Number(next()); break;
      case "--time-range": {
        const [a, b] = next().split(",").map(Number);
        spec.timeRange = [a, b];
        break;
      }
      default:
        throw new UsageError(`unknown flag ${arg}`);
    }
  }
  if (!spec.input || !spec.output) throw new UsageError("--input and --output are required");
  return spec;
}

class UsageError extends Error {}

function readInput(path: string): string {
  if (!existsSync(path)) {
    const err = new Error(`missing input file: ${path}`);
    err.name = "MissingInput";
    throw err;
  }
  return readFileSync(path, "utf8");
}

export function run(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const opts: FigureOptions = {
      width: spec.width,
      height: spec.height,
      timeRange: spec.timeRange,
    };
    let svg: string;
    switch (spec.kind) {
      case "trajectories":
        svg = renderTrajectories(parseTrajectory(readInput(spec.input), spec.input), opts);
        break;
      case "patch-snapshots":
      case "patches": {
        const overlay = spec.overlay
          ? parseTrajectory(readInput(spec.overlay), spec.overlay)
          : undefined;
        svg = renderPatches(parseSnapshot(readInput(spec.input), spec.input), {
          ...opts,
          trajectory: overlay,
        });
        break;
      }
      case "timeseries": {
        if (!spec.columns || spec.columns.length === 0) {
          throw new UsageError("timeseries needs --columns");
        }
        const panels: SeriesPanel[] = spec.columns.map((c) => ({
          column: c,
          loglog: spec.loglog,
        }));
        svg = renderTimeseries(parseTable(readInput(spec.input), spec.input), panels, opts);
        break;
      }
      default:
        throw new UsageError(`unknown figure kind ${JSON.stringify(spec.kind)}`);
    }
    writeFileSync(spec.output, svg);
    return 0;
  } catch (err) {
    const e = err as Error;
    process.stderr.write(JSON.stringify({ error: e.name ?? "Error", message: e.message }) + "\n");
    if (e.name === "MissingInput") return 4;
    if (e instanceof UsageError || e instanceof SchemaError) return 2;
    return 2;
  }
}

// invoked directly (not under test)
if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(run(process.argv.slice(2)));
}
