/**
 * Minimal deterministic SVG builder.
 *
 * Every coordinate passes through fmt(), which renders numbers with a fixed
 * precision and normalizes negative zero, so identical inputs always produce
 * byte-identical documents.
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate: ${v}`);
  const s = v.toPrecision(8);
  // strip trailing zeros of the fixed-precision form, normalize -0
  const out = Number(s).toString();
  return out === "-0" ? "0" : out;
}

export interface Viewport {
  width: number;
  height: number;
  /** world-coordinate bounds mapped into the margin-inset viewport */
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  margin: number;
}

export class Frame {
  constructor(readonly vp: Viewport) {
    if (vp.xMax <= vp.xMin || vp.yMax <= vp.yMin) {
      throw new Error("degenerate viewport bounds");
    }
  }

  x(wx: number): number {
    const { width, margin, xMin, xMax } = this.vp;
    return margin + ((wx - xMin) / (xMax - xMin)) * (width - 2 * margin);
  }

  y(wy: number): number {
    // SVG y grows downward
    const { height, margin, yMin, yMax } = this.vp;
    return height - margin - ((wy - yMin) / (yMax - yMin)) * (height - 2 * margin);
  }
}

/** Equal-aspect bounds: expand the smaller span to match, with padding. */
export function equalAspectBounds(
  xs: number[],
  ys: number[],
  pad = 0.05,
): { xMin: number; xMax: number; yMin: number; yMax: number } {
  let xMin = Math.min(...xs);
  let xMax = Math.max(...xs);
  let yMin = Math.min(...ys);
  let yMax = Math.max(...ys);
  if (xMax === xMin) { xMin -= 0.5; xMax += 0.5; }
  if (yMax === yMin) { yMin -= 0.5; yMax += 0.5; }
  const span = Math.max(xMax - xMin, yMax - yMin) * (1 + 2 * pad);
  const cx = 0.5 * (xMin + xMax);
  const cy = 0.5 * (yMin + yMax);
  return {
    xMin: cx - span / 2,
    xMax: cx + span / 2,
    yMin: cy - span / 2,
    yMax: cy + span / 2,
  };
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(width)}" height="${fmt(height)}" viewBox="0 0 ${fmt(width)} ${fmt(height)}">`,
    );
    this.parts.push(`<rect width="${fmt(width)}" height="${fmt(height)}" fill="white"/>`);
  }

  polyline(points: [number, number][], stroke: string, strokeWidth = 1.5): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${fmt(strokeWidth)}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string, opacity = 1): void {
    const op = opacity === 1 ? "" : ` fill-opacity="${fmt(opacity)}"`;
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"${op}/>`);
  }

  cross(cx: number, cy: number, half: number, stroke: string): void {
    this.parts.push(
      `<path d="M ${fmt(cx - half)} ${fmt(cy)} H ${fmt(cx + half)} M ${fmt(cx)} ${fmt(cy - half)} V ${fmt(cy + half)}" stroke="${stroke}" stroke-width="2" fill="none"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, strokeWidth = 1): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${fmt(strokeWidth)}"/>`,
    );
  }

  text(x: number, y: number, content: string, size = 12, fill = "black"): void {
    const esc = content
      .replace(/&/g, "&amp;")
      .replace(/</g, "&lt;")
      .replace(/>/g, "&gt;");
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="monospace" font-size="${fmt(size)}" fill="${fill}">${esc}</text>`,
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}
