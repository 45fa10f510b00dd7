import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parseSnapshot, parseTable, parseTrajectory } from "../src/csv.js";
import { renderPatches, renderTimeseries, renderTrajectories } from "../src/figures.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");
const read = (name: string) => readFileSync(join(FIXTURES, name), "utf8");

/** Synthetic two-vortex co-rotation trajectory: radius-1 circles. */
function corotationCsv(samples = 32): string {
  const lines = ["t,x1x,x1y,x2x,x2y,X_x,X_y,I,E"];
  for (let i = 0; i < samples; i++) {
    const th = (2 * Math.PI * i) / (samples - 1);
    const x = Math.cos(th);
    const y = Math.sin(th);
    lines.push([i, x, y, -x, -y, 0, 0, 2, Math.log(2) * 2].join(","));
  }
  return lines.join("\n") + "\n";
}

describe("trajectory figure", () => {
  it("is byte-deterministic", () => {
    const data = parseTrajectory(read("trajectory.csv"));
    const a = renderTrajectories(data);
    const b = renderTrajectories(parseTrajectory(read("trajectory.csv")));
    expect(a).toBe(b);
  });

  it("draws one curve per vortex", () => {
    const svg = renderTrajectories(parseTrajectory(read("trajectory.csv")));
    expect(svg.match(/<polyline/g)!.length).toBe(3);
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.endsWith("</svg>\n")).toBe(true);
  });

  it("keeps co-rotating circles on the viewport circle", () => {
    // two-vortex co-rotation: every drawn point is at world radius 1, so
    // after the equal-aspect transform all points are equidistant from the
    // viewport center
    const svg = renderTrajectories(parseTrajectory(corotationCsv()), {
      width: 400,
      height: 400,
    });
    const pts = [...svg.matchAll(/<polyline points="([^"]+)"/g)]
      .flatMap((m) => m[1].split(" "))
      .map((p) => p.split(",").map(Number));
    const radii = pts.map(([x, y]) => Math.hypot(x - 200, y - 200));
    const spread = Math.max(...radii) - Math.min(...radii);
    expect(spread).toBeLessThan(1e-3 * Math.max(...radii));
  });

  it("honors a time-range selection", () => {
    const data = parseTrajectory(read("trajectory.csv"));
    const svg = renderTrajectories(data, { timeRange: [1, 1.5] });
    expect(svg).toContain("t in [1, 1.5");
  });

  it("rejects a time range with fewer than two samples", () => {
    const data = parseTrajectory(read("trajectory.csv"));
    expect(() => renderTrajectories(data, { timeRange: [900, 901] })).toThrow(/2 samples/);
  });
});

describe("patch figure", () => {
  it("is byte-deterministic", () => {
    const snap = parseSnapshot(read("snapshot.csv"));
    expect(renderPatches(snap)).toBe(renderPatches(parseSnapshot(read("snapshot.csv"))));
  });

  it("draws every particle plus three center markers", () => {
    const snap = parseSnapshot(read("snapshot.csv"));
    const svg = renderPatches(snap);
    const total = snap.clouds.reduce((a, c) => a + c.x.length, 0);
    expect(svg.match(/<circle/g)!.length).toBe(total);
    expect(svg.match(/<path d=/g)!.length).toBe(3); // center-of-mass crosses
  });

  it("colors particles by circulation sign", () => {
    const svg = renderPatches(parseSnapshot(read("snapshot.csv")));
    expect(svg).toContain("#1f77b4"); // two negative patches
    expect(svg).toContain("#d62728"); // one positive patch
  });

  it("draws an overlay trajectory behind the particles when given", () => {
    const snap = parseSnapshot(read("snapshot.csv"));
    const traj = parseTrajectory(read("trajectory.csv"));
    const svg = renderPatches(snap, { trajectory: traj });
    expect(svg.match(/<polyline/g)!.length).toBe(3);
  });
});

describe("timeseries figure", () => {
  it("is byte-deterministic", () => {
    const table = parseTable(read("diagnostics.csv"));
    const panels = [{ column: "support1" }, { column: "L" }];
    expect(renderTimeseries(table, panels)).toBe(renderTimeseries(table, panels));
  });

  it("renders a constant series as a flat line", () => {
    const table = parseTable("t,v\n1,5\n2,5\n3,5\n");
    const svg = renderTimeseries(table, [{ column: "v" }]);
    const pts = svg
      .match(/<polyline points="([^"]+)"/)![1]
      .split(" ")
      .map((p) => Number(p.split(",")[1]));
    expect(Math.max(...pts) - Math.min(...pts)).toBe(0);
  });

  it("annotates an exact square-root law with slope 0.500", () => {
    const lines = ["t,v"];
    for (let t = 1; t <= 64; t *= 2) lines.push(`${t},${Math.sqrt(t)}`);
    const svg = renderTimeseries(parseTable(lines.join("\n")), [
      { column: "v", loglog: true },
    ]);
    expect(svg).toContain("slope 0.500");
  });

  it("rejects an unknown column", () => {
    const table = parseTable(read("diagnostics.csv"));
    expect(() => renderTimeseries(table, [{ column: "nope" }])).toThrow(/not in table/);
  });

  it("rejects log-log on non-positive data", () => {
    const table = parseTable("t,v\n1,-1\n2,-2\n");
    expect(() => renderTimeseries(table, [{ column: "v", loglog: true }])).toThrow(
      /positive/,
    );
  });
});
