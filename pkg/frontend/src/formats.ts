/**
 * Readers for the simulation package's documented output formats:
 * purity/rescaled/distances CSV, LEWG binary grids, and manifest JSON.
 * Everything here is read-only; nothing is recomputed from physics.
 */

import { readFileSync } from "node:fs";

export class FormatError extends Error {}

export interface PuritySeries {
  t: number[];
  p: number[];
  stderr: number[];
}

export interface DistanceRow {
  label: string;
  n: number;
  eps: number;
  distance: number;
}

export type GridKind = "wigner" | "husimi" | "classical";

export interface Grid {
  kind: GridKind;
  rows: number;
  cols: number;
  /** row-major, rows x cols */
  values: Float64Array;
}

function parseNumericCsv(path: string, header: string): number[][] {
  const text = readFileSync(path, "utf-8");
  const lines = text.trim().split("\n");
  if (lines[0] !== header) {
    throw new FormatError(`${path}: expected header "${header}", got "${lines[0]}"`);
  }
  return lines.slice(1).map((line, i) => {
    const fields = line.split(",").map(Number);
    if (fields.some((v) => Number.isNaN(v))) {
      throw new FormatError(`${path}: non-numeric value on data row ${i + 1}`);
    }
    return fields;
  });
}

export function readPurityCsv(path: string): PuritySeries {
  const rows = parseNumericCsv(path, "t,P,P_stderr");
  return {
    t: rows.map((r) => r[0]),
    p: rows.map((r) => r[1]),
    stderr: rows.map((r) => r[2]),
  };
}

/** Rescaled series share the purity layout but carry float times. */
export const readRescaledCsv = readPurityCsv;

export function readDistancesCsv(path: string): DistanceRow[] {
  const text = readFileSync(path, "utf-8");
  const lines = text.trim().split("\n");
  if (lines[0] !== "label,N,eps,distance") {
    throw new FormatError(`${path}: not a distances file`);
  }
  return lines.slice(1).map((line) => {
    const [label, n, eps, distance] = line.split(",");
    return { label, n: Number(n), eps: Number(eps), distance: Number(distance) };
  });
}

const GRID_MAGIC = "LEWG";
const KIND_NAMES: GridKind[] = ["wigner", "husimi", "classical"];

export function readGrid(path: string): Grid {
  const raw = readFileSync(path);
  if (raw.length < 32 || raw.toString("latin1", 0, 4) !== GRID_MAGIC) {
    throw new FormatError(`${path}: bad grid magic (want ${GRID_MAGIC})`);
  }
  const kindCode = raw.readUInt32LE(4);
  const rows = Number(raw.readBigUInt64LE(8));
  const cols = Number(raw.readBigUInt64LE(16));
  const kind = KIND_NAMES[kindCode];
  if (kind === undefined) {
    throw new FormatError(`${path}: unknown kind code ${kindCode}`);
  }
  const expected = 32 + 8 * rows * cols;
  if (raw.length !== expected) {
    throw new FormatError(`${path}: size ${raw.length} != expected ${expected}`);
  }
  // copy out of the Buffer pool so the view owns aligned memory
  const values = new Float64Array(rows * cols);
  for (let i = 0; i < values.length; i++) {
    values[i] = raw.readDoubleLE(32 + 8 * i);
  }
  return { kind, rows, cols, values };
}

export interface ManifestCell {
  k1: number;
  k2: number;
  eps: number;
  csv?: string;
  rescaled_csv?: string;
  fit?: { rate?: number; saturation?: number; error?: string };
  params?: { lambda1: number; lambda2: number };
  [key: string]: unknown;
}

export interface Manifest {
  kind: string;
  cells?: ManifestCell[];
  lambda?: Record<string, { lam: number }>;
  master?: { slope: number | null; spread: number };
  saturation_target?: number;
  runs?: { n: number; eps: number; distance: number; label: string; wigner_grid: string }[];
  config?: { grid?: { n1?: number; n2?: number } };
  [key: string]: unknown;
}

export function readManifest(path: string): Manifest {
  let parsed: unknown;
  try {
    parsed = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new FormatError(`${path}: ${(err as Error).message}`);
  }
  if (typeof parsed !== "object" || parsed === null || !("kind" in parsed)) {
    throw new FormatError(`${path}: not a run manifest (no kind)`);
  }
  return parsed as Manifest;
}
