/**
 * Figure renderers.  Pure functions: parsed CSV data in, SVG text out.
 * Styling is fixed (no randomness), keyed by curve index and by the sign of
 * the circulation where the format carries it, so output is byte-deterministic.
 */

import { SnapshotData, TableData, TrajectoryData } from "./csv.js";
import { equalAspectBounds, fmt, Frame, SvgDoc } from "./svg.js";

const CURVE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const NEGATIVE_FILL = "#1f77b4"; // clockwise (negative circulation) particles
const POSITIVE_FILL = "#d62728"; // counter-clockwise

export interface FigureOptions {
  width?: number;
  height?: number;
  /** inclusive [tMin, tMax] filter; default all samples */
  timeRange?: [number, number];
}

function axesFrame(doc: SvgDoc, frame: Frame): void {
  const { width, height, margin } = frame.vp;
  doc.line(margin, height - margin, width - margin, height - margin, "#444");
  doc.line(margin, margin, margin, height - margin, "#444");
}

export function renderTrajectories(data: TrajectoryData, opts: FigureOptions = {}): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 640;
  let keep = data.times.map((_, i) => i);
  if (opts.timeRange) {
    const [a, b] = opts.timeRange;
    keep = keep.filter((i) => data.times[i] >= a && data.times[i] <= b);
  }
  if (keep.length < 2) {
    throw new Error(`need at least 2 samples in the selected time range, got ${keep.length}`);
  }
  const xs: number[] = [];
  const ys: number[] = [];
  for (const i of keep) {
    for (const [x, y] of data.positions[i]) {
      xs.push(x);
      ys.push(y);
    }
  }
  const bounds = equalAspectBounds(xs, ys);
  const doc = new SvgDoc(width, height);
  const frame = new Frame({ width, height, margin: 40, ...bounds });
  axesFrame(doc, frame);
  for (let v = 0; v < data.n; v++) {
    const pts: [number, number][] = keep.map((i) => [
      frame.x(data.positions[i][v][0]),
      frame.y(data.positions[i][v][1]),
    ]);
    const color = CURVE_COLORS[v % CURVE_COLORS.length];
    doc.polyline(pts, color);
    // start and end markers
    doc.circle(pts[0][0], pts[0][1], 3, color);
    doc.cross(pts[pts.length - 1][0], pts[pts.length - 1][1], 5, color);
  }
  const t0 = data.times[keep[0]];
  const t1 = data.times[keep[keep.length - 1]];
  doc.text(44, 24, `trajectories, t in [${fmt(t0)}, ${fmt(t1)}], ${data.n} vortices`);
  return doc.render();
}

export interface PatchOverlay {
  /** optional centerline trajectory drawn behind the particles */
  trajectory?: TrajectoryData;
}

export function renderPatches(
  snap: SnapshotData,
  opts: FigureOptions & PatchOverlay = {},
): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 640;
  const xs: number[] = [];
  const ys: number[] = [];
  for (const c of snap.clouds) {
    xs.push(...c.x);
    ys.push(...c.y);
  }
  const bounds = equalAspectBounds(xs, ys);
  const doc = new SvgDoc(width, height);
  const frame = new Frame({ width, height, margin: 40, ...bounds });
  axesFrame(doc, frame);
  if (opts.trajectory) {
    for (let v = 0; v < opts.trajectory.n; v++) {
      const pts: [number, number][] = opts.trajectory.positions.map((p) => [
        frame.x(p[v][0]),
        frame.y(p[v][1]),
      ]);
      doc.polyline(pts, "#bbbbbb", 1);
    }
  }
  for (let c = 0; c < snap.clouds.length; c++) {
    const cloud = snap.clouds[c];
    const fill = snap.signs[c] < 0 ? NEGATIVE_FILL : POSITIVE_FILL;
    for (let p = 0; p < cloud.x.length; p++) {
      doc.circle(frame.x(cloud.x[p]), frame.y(cloud.y[p]), 2, fill, 0.6);
    }
  }
  // strength-weighted center markers on top
  for (let c = 0; c < snap.clouds.length; c++) {
    const cloud = snap.clouds[c];
    let gw = 0;
    let cx = 0;
    let cy = 0;
    for (let p = 0; p < cloud.gamma.length; p++) {
      gw += cloud.gamma[p];
      cx += cloud.gamma[p] * cloud.x[p];
      cy += cloud.gamma[p] * cloud.y[p];
    }
    if (gw !== 0) {
      doc.cross(frame.x(cx / gw), frame.y(cy / gw), 6, "black");
    }
  }
  doc.text(44, 24, `patches at t = ${fmt(snap.time)}`);
  return doc.render();
}

export interface SeriesPanel {
  column: string;
  /** log-log plot with a least-squares slope annotation */
  loglog?: boolean;
}

function fitSlope(ts: number[], vs: number[]): number {
  const n = ts.length;
  const mx = ts.reduce((a, b) => a + b, 0) / n;
  const my = vs.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (ts[i] - mx) ** 2;
    sxy += (ts[i] - mx) * (vs[i] - my);
  }
  if (sxx === 0) throw new Error("cannot fit a slope to a single abscissa");
  return sxy / sxx;
}

export function renderTimeseries(
  table: TableData,
  panels: SeriesPanel[],
  opts: FigureOptions = {},
): string {
  if (panels.length === 0) throw new Error("no panels requested");
  for (const p of panels) {
    if (!table.columns.includes(p.column)) {
      throw new Error(`column not in table: ${p.column}`);
    }
  }
  const width = opts.width ?? 560;
  const panelHeight = 180;
  const height = opts.height ?? panelHeight * panels.length;
  const doc = new SvgDoc(width, height);
  let rows = table.rows;
  if (opts.timeRange) {
    const [a, b] = opts.timeRange;
    rows = rows.filter((r) => r.get("t")! >= a && r.get("t")! <= b);
  }
  if (rows.length < 2) throw new Error("need at least 2 rows in the selected time range");
  panels.forEach((panel, pi) => {
    let ts = rows.map((r) => r.get("t")!);
    let vs = rows.map((r) => r.get(panel.column)!);
    let slope: number | undefined;
    if (panel.loglog) {
      const keep = ts.map((_, i) => i).filter((i) => ts[i] > 0 && vs[i] > 0);
      if (keep.length < 2) throw new Error(`${panel.column}: too few positive samples for log-log`);
      ts = keep.map((i) => Math.log(rows[i].get("t")!));
      vs = keep.map((i) => Math.log(rows[i].get(panel.column)!));
      slope = fitSlope(ts, vs);
    }
    const y0 = pi * (height / panels.length);
    const vMin = Math.min(...vs);
    const vMax = Math.max(...vs);
    const frame = new Frame({
      width,
      height: height / panels.length,
      margin: 36,
      xMin: Math.min(...ts),
      xMax: Math.max(...ts),
      yMin: vMin === vMax ? vMin - 0.5 : vMin,
      yMax: vMin === vMax ? vMax + 0.5 : vMax,
    });
    const pts: [number, number][] = ts.map((t, i) => [frame.x(t), y0 + frame.y(vs[i])]);
    doc.polyline(pts, CURVE_COLORS[pi % CURVE_COLORS.length]);
    const label =
      slope === undefined
        ? panel.column
        : `${panel.column} (log-log), slope ${slope.toFixed(3)}`;
    doc.text(40, y0 + 16, label);
  });
  return doc.render();
}
