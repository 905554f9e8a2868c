/**
 * 2x2 phase-space heatmap panel: classical reference (top left), then the
 * quantum grids in run order (uncoupled, coupled, coupled at larger N).
 * Rows share one color scale; any signed grid in a row switches the whole
 * row to a diverging map symmetric about zero. Panel annotations (N, eps,
 * quantum-classical distance) are copied from the manifest.
 */

import { makeScale, type ColorScale } from "./color.js";
import { phaseGridNames, resolveInput, validateSpec, type FigureSpec } from "./figure.js";
import { readGrid, type Grid } from "./formats.js";
import type { Heatmap, Primitive, Scene } from "./scene.js";

const CELL = 260; // panel edge in pixels
const GAP = 56;
const MT = 34;
const ML = 44;
const BAR_W = 12;

function fmt(v: number, digits = 3): string {
  return Number(v.toPrecision(digits)).toString();
}

/** x along width, p upward; grid values are [x index, p index] row-major. */
function gridToHeatmap(grid: Grid, scale: ColorScale): Heatmap {
  const { rows, cols, values } = grid;
  const rgb = new Uint8Array(rows * cols * 3);
  for (let py = 0; py < cols; py++) {
    const j = cols - 1 - py;
    for (let px = 0; px < rows; px++) {
      const v = values[px * cols + j];
      const c = scale.map(v);
      const o = 3 * (py * rows + px);
      rgb[o] = c[0];
      rgb[o + 1] = c[1];
      rgb[o + 2] = c[2];
    }
  }
  return { width: rows, height: cols, rgb };
}

function colorbar(scale: ColorScale, height: number): Heatmap {
  const rgb = new Uint8Array(height * 3);
  for (let y = 0; y < height; y++) {
    const v = scale.vmax - ((scale.vmax - scale.vmin) * y) / (height - 1);
    const c = scale.map(v);
    rgb.set(c, 3 * y);
  }
  return { width: 1, height, rgb };
}

export function rowScale(grids: Grid[]): ColorScale {
  const signed = grids.some((g) => g.kind === "wigner");
  return makeScale(grids.map((g) => g.values), signed);
}

export function buildPhaseScene(spec: FigureSpec): Scene {
  const manifest = validateSpec(spec);
  const names = phaseGridNames(manifest, spec.manifest);
  const grids = names.map((name) => readGrid(resolveInput(spec, name)));
  const runs = manifest.runs ?? [];

  const labels = [
    `classical N=${fmt(runs[2]?.n ?? 0)}`,
    ...runs.map((r) => `N=${fmt(r.n)} eps=${fmt(r.eps)} d=${fmt(r.distance)}`),
  ];

  const width = ML + 2 * CELL + GAP + 70;
  const height = MT + 2 * CELL + GAP + 30;
  const prims: Primitive[] = [];
  const scales: ColorScale[] = [];

  for (let row = 0; row < 2; row++) {
    const rowGrids = [grids[2 * row], grids[2 * row + 1]];
    const scale = rowScale(rowGrids);
    scales.push(scale);
    for (let col = 0; col < 2; col++) {
      const idx = 2 * row + col;
      const x = ML + col * (CELL + GAP);
      const y = MT + row * (CELL + GAP);
      prims.push({ kind: "image", x, y, w: CELL, h: CELL, map: gridToHeatmap(grids[idx], scale) });
      prims.push({ kind: "frame", x, y, w: CELL, h: CELL, color: "#000000" });
      prims.push({ kind: "text", x, y: y - 6, s: labels[idx], color: "#000000" });
    }
    const bx = ML + 2 * CELL + GAP + 10;
    const by = MT + row * (CELL + GAP);
    prims.push({ kind: "image", x: bx, y: by, w: BAR_W, h: CELL, map: colorbar(scale, 128) });
    prims.push({ kind: "frame", x: bx, y: by, w: BAR_W, h: CELL, color: "#000000" });
    prims.push({ kind: "text", x: bx + BAR_W + 4, y: by + 8, s: fmt(scale.vmax, 2), color: "#000000" });
    prims.push({ kind: "text", x: bx + BAR_W + 4, y: by + CELL, s: fmt(scale.vmin, 2), color: "#000000" });
  }

  prims.push({ kind: "text", x: ML, y: MT + 2 * CELL + GAP + 16, s: "x left to right, p bottom to top", color: "#555555" });

  return { width, height, prims };
}
