/**
 * FigureSpec wiring: a figure is described by a manifest path, a figure
 * kind, optional axis ranges, and the output image path. Data files are
 * resolved through the manifest's own records (never rescanned from the
 * directory), so a figure can only show what the run wrote down.
 */

import { existsSync } from "node:fs";
import path from "node:path";

import { FormatError, readGrid, readManifest, readPurityCsv, type Manifest } from "./formats.js";

export class FigureError extends Error {}

export interface AxisRange {
  min?: number;
  max?: number;
}

export type FigureKind = "purity" | "collapse" | "phase-space";

export interface FigureSpec {
  kind: FigureKind;
  /** run manifest; sibling files resolve relative to its directory */
  manifest: string;
  output: string;
  xRange?: AxisRange;
  yRange?: AxisRange;
}

export function outputFormat(spec: FigureSpec): "svg" | "png" {
  if (spec.output.endsWith(".svg")) return "svg";
  if (spec.output.endsWith(".png")) return "png";
  throw new FigureError(`output must end in .svg or .png, got ${spec.output}`);
}

export function resolveInput(spec: FigureSpec, name: string): string {
  return path.join(path.dirname(spec.manifest), name);
}

/** Every input referenced by the spec must exist and parse. */
export function validateSpec(spec: FigureSpec): Manifest {
  outputFormat(spec);
  if (!existsSync(spec.manifest)) {
    throw new FigureError(`manifest not found: ${spec.manifest}`);
  }
  const manifest = readManifest(spec.manifest);
  if (spec.kind === "purity" || spec.kind === "collapse") {
    const cells = (manifest.cells ?? []).filter((c) => c.csv);
    if (cells.length === 0) {
      throw new FigureError(`${spec.manifest}: no purity series to plot`);
    }
    for (const cell of cells) {
      const name = spec.kind === "collapse" ? cell.rescaled_csv ?? cell.csv : cell.csv;
      const series = readPurityCsv(resolveInput(spec, name as string));
      if (series.t.length === 0) {
        throw new FigureError(`${name}: empty series`);
      }
    }
  } else {
    for (const name of phaseGridNames(manifest, spec.manifest)) {
      readGrid(resolveInput(spec, name));
    }
  }
  return manifest;
}

/** Classical reference plus the three quantum panels, in layout order. */
export function phaseGridNames(manifest: Manifest, manifestPath: string): string[] {
  const outputs = (manifest.outputs ?? []) as { path: string }[];
  const classical = outputs.find((o) => o.path.startsWith("grid_classical"));
  const runs = manifest.runs ?? [];
  if (!classical || runs.length < 3) {
    throw new FormatError(`${manifestPath}: not a phase-space comparison manifest`);
  }
  return [classical.path, ...runs.map((r) => r.wigner_grid)];
}
