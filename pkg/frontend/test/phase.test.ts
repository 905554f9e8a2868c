import { copyFileSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { FormatError, readGrid, readManifest } from "../src/formats.js";
import type { FigureSpec } from "../src/figure.js";
import { buildPhaseScene, rowScale } from "../src/phase.js";
import { renderScene, renderSvg, type Primitive, type Scene } from "../src/scene.js";

const FIXTURES = fileURLToPath(new URL("fixtures", import.meta.url));
const PHASE = path.join(FIXTURES, "phase3", "manifest.json");

const spec: FigureSpec = { kind: "phase-space", manifest: PHASE, output: "out.png" };

type ImagePrim = Extract<Primitive, { kind: "image" }>;

function panelImages(scene: Scene): ImagePrim[] {
  // panels are the large images; colorbars are 12px wide
  return scene.prims.filter((p): p is ImagePrim => p.kind === "image" && p.w > 100);
}

describe("buildPhaseScene", () => {
  const scene = buildPhaseScene(spec);

  it("lays out four panels and two colorbars", () => {
    const images = scene.prims.filter((p) => p.kind === "image");
    expect(images.length).toBe(6);
    expect(panelImages(scene).length).toBe(4);
  });

  it("annotates each quantum panel with manifest N, eps, distance", () => {
    const manifest = readManifest(PHASE);
    const labels = scene.prims
      .filter((p): p is Extract<Primitive, { kind: "text" }> => p.kind === "text")
      .map((p) => p.s);
    expect(labels).toContain("classical N=128");
    for (const run of manifest.runs!) {
      const d = Number(run.distance.toPrecision(3)).toString();
      const eps = Number(run.eps.toPrecision(3)).toString();
      expect(labels).toContain(`N=${run.n} eps=${eps} d=${d}`);
    }
  });

  it("uses a symmetric diverging scale for signed grids", () => {
    const wigner = readGrid(path.join(FIXTURES, "phase3", "grid_wigner_N64_eps4.lewg"));
    expect(Math.min(...wigner.values)).toBeLessThan(0);
    const scale = rowScale([wigner]);
    expect(scale.vmin).toBeCloseTo(-scale.vmax, 12);
    const zero = scale.map(0);
    expect(Math.min(...zero)).toBeGreaterThan(200); // near-white at zero
    const [rPos, , bPos] = scale.map(scale.vmax);
    const [rNeg, , bNeg] = scale.map(scale.vmin);
    expect(rPos).toBeGreaterThan(bPos); // warm end for positive values
    expect(bNeg).toBeGreaterThan(rNeg); // cold end for negative values
  });

  it("anchors density grids at zero", () => {
    const classical = readGrid(path.join(FIXTURES, "phase3", "grid_classical_N128.lewg"));
    const scale = rowScale([classical]);
    expect(scale.vmin).toBe(0);
    expect(scale.vmax).toBe(Math.max(...classical.values));
  });

  it("renders deterministically in both formats", () => {
    const again = buildPhaseScene(spec);
    expect(renderScene(scene, "png").equals(renderScene(again, "png"))).toBe(true);
    expect(renderScene(scene, "svg").equals(renderScene(again, "svg"))).toBe(true);
  });
});

describe("degenerate and synthetic inputs", () => {
  it("rejects a manifest without comparison runs", () => {
    const sweep = path.join(FIXTURES, "sweep7", "manifest.json");
    expect(() => buildPhaseScene({ ...spec, manifest: sweep })).toThrow(FormatError);
    expect(() => buildPhaseScene({ ...spec, manifest: sweep })).toThrow(/not a phase-space comparison/);
  });

  it("produces four identical images when all panels share one grid", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "phase-"));
    const src = path.join(FIXTURES, "phase3", "grid_wigner_N64_eps4.lewg");
    copyFileSync(src, path.join(dir, "grid_classical_same.lewg"));
    copyFileSync(src, path.join(dir, "same.lewg"));
    const manifest = {
      kind: "wigner-compare",
      outputs: [{ path: "grid_classical_same.lewg" }],
      runs: [1, 2, 3].map(() => ({ n: 64, eps: 4, distance: 0, label: "same", wigner_grid: "same.lewg" })),
    };
    writeFileSync(path.join(dir, "manifest.json"), JSON.stringify(manifest));
    const scene = buildPhaseScene({ ...spec, manifest: path.join(dir, "manifest.json") });
    const rasters = panelImages(scene).map((p) => Buffer.from(p.map.rgb));
    expect(rasters.length).toBe(4);
    for (const r of rasters.slice(1)) {
      expect(r.equals(rasters[0])).toBe(true);
    }
    // the SVG embeds byte-identical payloads too
    const hrefs = [...renderSvg(scene).matchAll(/href="([^"]+)"/g)].map((m) => m[1]);
    const panels = hrefs.filter((_, i) => hrefs.length === 6 && i % 3 !== 2); // drop the two colorbars
    expect(new Set(panels).size).toBe(1);
  });
});

describe("grid structure behind the figure", () => {
  it("shows ghost images at half-lattice shifts of the main packet", () => {
    const grid = readGrid(path.join(FIXTURES, "phase3", "grid_wigner_N64_eps0.lewg"));
    const n = grid.rows / 2; // doubled lattice
    let peak = 0;
    let pa = 0;
    let pb = 0;
    grid.values.forEach((v, i) => {
      if (Math.abs(v) > peak) {
        peak = Math.abs(v);
        pa = Math.floor(i / grid.cols);
        pb = i % grid.cols;
      }
    });
    const at = (a: number, b: number) => grid.values[((a + grid.rows) % grid.rows) * grid.cols + ((b + grid.cols) % grid.cols)];
    for (const [da, db] of [[n, 0], [0, n], [n, n]] as const) {
      const ghost = at(pa + da, pb + db);
      expect(Math.abs(ghost)).toBeGreaterThan(0.5 * peak);
    }
  });
});
