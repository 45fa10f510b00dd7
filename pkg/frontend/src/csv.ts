/**
 * Parsers for the on-disk CSV interfaces produced by the vortexlab CLI.
 *
 * Three formats are consumed:
 *  - trajectory CSV: header `t,x1x,x1y,...,X_x,X_y,I,E`, one row per sample;
 *  - snapshot CSV: one `# key=value ...` metadata line (format_version, time,
 *    blob_radius, comma-joined signs) followed by `cloud_id,gamma,x,y` rows;
 *  - diagnostics CSV: plain header/rows, must contain at least a `t` column.
 *
 * All parsers validate the schema and throw SchemaError with a path-qualified
 * message; they never guess at missing columns.
 */

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

function splitCsvLine(line: string): string[] {
  // The producer never quotes fields (pure numeric output), so a plain
  // split is exact.
  return line.split(",");
}

function parseNum(raw: string, where: string): number {
  const v = Number(raw);
  if (raw.trim() === "" || Number.isNaN(v)) {
    throw new SchemaError(`${where}: not a number: ${JSON.stringify(raw)}`);
  }
  return v;
}

export interface TrajectoryData {
  /** number of tracked vortices */
  n: number;
  times: number[];
  /** positions[i][v] = [x, y] of vortex v at sample i */
  positions: number[][][];
  invariants: { X: [number, number]; I: number; E: number }[];
}

export function parseTrajectory(text: string, source = "trajectory"): TrajectoryData {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new SchemaError(`${source}: empty file`);
  const header = splitCsvLine(lines[0]);
  if (header[0] !== "t") throw new SchemaError(`${source}: first column must be t`);
  const tail = header.slice(-4);
  if (tail.join(",") !== "X_x,X_y,I,E") {
    throw new SchemaError(`${source}: expected trailing columns X_x,X_y,I,E`);
  }
  const nPosCols = header.length - 5;
  if (nPosCols < 2 || nPosCols % 2 !== 0) {
    throw new SchemaError(`${source}: malformed position columns`);
  }
  const n = nPosCols / 2;
  for (let v = 1; v <= n; v++) {
    if (header[2 * v - 1] !== `x${v}x` || header[2 * v] !== `x${v}y`) {
      throw new SchemaError(`${source}: expected columns x${v}x,x${v}y`);
    }
  }
  if (lines.length < 2) throw new SchemaError(`${source}: no data rows`);
  const times: number[] = [];
  const positions: number[][][] = [];
  const invariants: TrajectoryData["invariants"] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = splitCsvLine(lines[i]);
    if (cells.length !== header.length) {
      throw new SchemaError(`${source}: row ${i} has ${cells.length} cells, want ${header.length}`);
    }
    const where = `${source}: row ${i}`;
    times.push(parseNum(cells[0], where));
    const pos: number[][] = [];
    for (let v = 0; v < n; v++) {
      pos.push([parseNum(cells[1 + 2 * v], where), parseNum(cells[2 + 2 * v], where)]);
    }
    positions.push(pos);
    invariants.push({
      X: [parseNum(cells[header.length - 4], where), parseNum(cells[header.length - 3], where)],
      I: parseNum(cells[header.length - 2], where),
      E: parseNum(cells[header.length - 1], where),
    });
  }
  return { n, times, positions, invariants };
}

export interface SnapshotData {
  formatVersion: number;
  time: number;
  blobRadius: number;
  signs: number[];
  /** particles grouped by cloud id, in file order */
  clouds: { gamma: number[]; x: number[]; y: number[] }[];
}

export function parseSnapshot(text: string, source = "snapshot"): SnapshotData {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new SchemaError(`${source}: empty file`);
  if (!lines[0].startsWith("# ")) {
    throw new SchemaError(`${source}: missing metadata line`);
  }
  const meta = new Map<string, string>();
  for (const item of lines[0].slice(2).split(/\s+/)) {
    const eq = item.indexOf("=");
    if (eq < 0) throw new SchemaError(`${source}: bad metadata item ${JSON.stringify(item)}`);
    meta.set(item.slice(0, eq), item.slice(eq + 1));
  }
  for (const key of ["format_version", "time", "blob_radius", "signs"]) {
    if (!meta.has(key)) throw new SchemaError(`${source}: metadata missing ${key}`);
  }
  const formatVersion = parseNum(meta.get("format_version")!, `${source}: format_version`);
  if (formatVersion !== 1) {
    throw new SchemaError(`${source}: unsupported format_version ${formatVersion}`);
  }
  const signs = meta
    .get("signs")!
    .split(",")
    .map((s) => parseNum(s, `${source}: signs`));
  if (splitCsvLine(lines[1]).join(",") !== "cloud_id,gamma,x,y") {
    throw new SchemaError(`${source}: expected header cloud_id,gamma,x,y`);
  }
  const clouds: SnapshotData["clouds"] = signs.map(() => ({ gamma: [], x: [], y: [] }));
  for (let i = 2; i < lines.length; i++) {
    const cells = splitCsvLine(lines[i]);
    if (cells.length !== 4) throw new SchemaError(`${source}: row ${i} has ${cells.length} cells`);
    const where = `${source}: row ${i}`;
    const cid = parseNum(cells[0], where);
    if (!Number.isInteger(cid) || cid < 0 || cid >= clouds.length) {
      throw new SchemaError(`${where}: cloud_id ${cells[0]} out of range`);
    }
    clouds[cid].gamma.push(parseNum(cells[1], where));
    clouds[cid].x.push(parseNum(cells[2], where));
    clouds[cid].y.push(parseNum(cells[3], where));
  }
  for (let c = 0; c < clouds.length; c++) {
    if (clouds[c].gamma.length === 0) {
      throw new SchemaError(`${source}: cloud ${c} has no particles`);
    }
  }
  return {
    formatVersion,
    time: parseNum(meta.get("time")!, `${source}: time`),
    blobRadius: parseNum(meta.get("blob_radius")!, `${source}: blob_radius`),
    signs,
    clouds,
  };
}

export interface TableData {
  columns: string[];
  /** rows[i].get(column) */
  rows: Map<string, number>[];
}

export function parseTable(text: string, source = "table"): TableData {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new SchemaError(`${source}: empty file`);
  const columns = splitCsvLine(lines[0]);
  if (!columns.includes("t")) throw new SchemaError(`${source}: missing t column`);
  if (lines.length < 2) throw new SchemaError(`${source}: no data rows`);
  const rows: Map<string, number>[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = splitCsvLine(lines[i]);
    if (cells.length !== columns.length) {
      throw new SchemaError(`${source}: row ${i} has ${cells.length} cells, want ${columns.length}`);
    }
    const row = new Map<string, number>();
    for (let c = 0; c < columns.length; c++) {
      row.set(columns[c], parseNum(cells[c], `${source}: row ${i}, column ${columns[c]}`));
    }
    rows.push(row);
  }
  return { columns, rows };
}
