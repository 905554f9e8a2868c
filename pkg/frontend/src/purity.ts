/**
 * Log-scale purity decay figure. Plain purity sweeps draw P(t) per
 * (K, eps) cell; collapse runs draw every curve against rescaled time
 * lambda*(t - tau) so they fall on one master curve. Reference lines
 * (exponential at the measured Lyapunov rate, saturation floor) come
 * straight from manifest values.
 */

import { curveColor } from "./color.js";
import { FigureError, resolveInput, validateSpec, type FigureSpec } from "./figure.js";
import { readPurityCsv, type Manifest, type ManifestCell } from "./formats.js";
import type { Primitive, Scene } from "./scene.js";

const W = 640;
const H = 440;
const ML = 62; // margins
const MR = 160;
const MT = 28;
const MB = 42;

interface Curve {
  label: string;
  rate: number | null;
  t: number[];
  p: number[];
}

function fmt(v: number, digits = 3): string {
  return Number(v.toPrecision(digits)).toString();
}

function loadCurves(spec: FigureSpec, manifest: Manifest): Curve[] {
  const cells = (manifest.cells ?? []).filter((c): c is ManifestCell & { csv: string } => !!c.csv);
  return cells.map((cell) => {
    const name = spec.kind === "collapse" ? (cell.rescaled_csv as string) ?? cell.csv : cell.csv;
    const series = readPurityCsv(resolveInput(spec, name));
    const label =
      spec.kind === "collapse" ? `K=${fmt(cell.k1)}` : `eps=${fmt(cell.eps)}`;
    return { label, rate: cell.fit?.rate ?? null, t: series.t, p: series.p };
  });
}

/** Slowest decay first, so the legend reads as a rate ordering. */
function legendOrder(curves: Curve[]): Curve[] {
  return [...curves].sort((a, b) => (a.rate ?? Infinity) - (b.rate ?? Infinity));
}

export function referenceLambda(manifest: Manifest): number | null {
  const cell = (manifest.cells ?? []).find((c) => c.params);
  if (!cell?.params) return null;
  return Math.min(cell.params.lambda1, cell.params.lambda2);
}

export function buildPurityScene(spec: FigureSpec): Scene {
  const manifest = validateSpec(spec);
  const curves = loadCurves(spec, manifest);

  const saturation =
    spec.kind === "collapse"
      ? manifest.saturation_target ?? null
      : (manifest.cells ?? []).find((c) => c.fit?.saturation)?.fit?.saturation ?? null;

  let pFloor = Infinity;
  let tMin = Infinity;
  let tMax = -Infinity;
  for (const c of curves) {
    for (const v of c.p) if (v > 0 && v < pFloor) pFloor = v;
    tMin = Math.min(tMin, c.t[0]);
    tMax = Math.max(tMax, c.t[c.t.length - 1]);
  }
  if (!Number.isFinite(pFloor) || pFloor >= 1) pFloor = 1e-3;
  const x0 = spec.xRange?.min ?? Math.min(0, tMin);
  const x1 = spec.xRange?.max ?? tMax;
  const yLo = Math.log10(spec.yRange?.min ?? Math.max(pFloor / 2, 1e-12));
  const yHi = Math.log10(spec.yRange?.max ?? 1.0);

  const plotW = W - ML - MR;
  const plotH = H - MT - MB;
  const sx = (t: number) => ML + ((t - x0) / (x1 - x0 || 1)) * plotW;
  const sy = (p: number) =>
    MT + (1 - (Math.log10(Math.max(p, 1e-300)) - yLo) / (yHi - yLo || 1)) * plotH;

  const prims: Primitive[] = [];
  prims.push({ kind: "frame", x: ML, y: MT, w: plotW, h: plotH, color: "#000000" });

  // y ticks at decades
  for (let d = Math.ceil(yLo); d <= Math.floor(yHi); d++) {
    const y = sy(10 ** d);
    prims.push({ kind: "line", x1: ML - 4, y1: y, x2: ML, y2: y, color: "#000000" });
    prims.push({
      kind: "text", x: ML - 8, y: y + 3, s: d === 0 ? "1" : `1e${d}`,
      color: "#000000", anchor: "end",
    });
  }
  // x ticks
  const xStep = Math.max(1, Math.round((x1 - x0) / 6));
  for (let t = Math.ceil(x0); t <= x1; t += xStep) {
    const x = sx(t);
    prims.push({ kind: "line", x1: x, y1: MT + plotH, x2: x, y2: MT + plotH + 4, color: "#000000" });
    prims.push({ kind: "text", x, y: MT + plotH + 16, s: fmt(t), color: "#000000", anchor: "middle" });
  }
  const xLabel = spec.kind === "collapse" ? "lambda (t - tau)" : "t (kicks)";
  prims.push({ kind: "text", x: ML + plotW / 2, y: H - 10, s: xLabel, color: "#000000", anchor: "middle" });
  prims.push({ kind: "text", x: ML, y: 16, s: "P(t)", color: "#000000" });

  const clip = (pts: [number, number][]) =>
    pts.filter(([x, y]) => x >= ML - 0.5 && x <= ML + plotW + 0.5 && y >= MT - 0.5 && y <= MT + plotH + 0.5);

  // reference exponential from manifest lambda; collapse axes make it slope -1
  const lam = spec.kind === "collapse" ? 1.0 : referenceLambda(manifest);
  if (lam === null) {
    console.warn(`${spec.manifest}: no lambda in manifest, skipping reference line`);
  } else {
    const pts: [number, number][] = [];
    for (let i = 0; i <= 200; i++) {
      const t = x0 + ((x1 - x0) * i) / 200;
      pts.push([sx(t), sy(Math.exp(-lam * Math.max(t, 0)))]);
    }
    prims.push({ kind: "polyline", points: clip(pts), color: "#000000", width: 1 });
    const tag = spec.kind === "collapse" ? "exp(-x)" : `exp(-lambda t), lambda=${fmt(lam)}`;
    prims.push({ kind: "text", x: ML + plotW + 6, y: MT + 12, s: tag, color: "#000000" });
  }

  if (saturation !== null && saturation > 0) {
    const y = sy(saturation);
    if (y <= MT + plotH) {
      prims.push({
        kind: "line", x1: ML, y1: y, x2: ML + plotW, y2: y,
        color: "#555555", dashed: true,
      });
      prims.push({
        kind: "text", x: ML + plotW + 6, y: y + 3, s: `2/N=${fmt(saturation)}`, color: "#555555",
      });
    }
  }

  const ordered = legendOrder(curves);
  for (const [i, curve] of ordered.entries()) {
    const color = curveColor(i);
    const pts: [number, number][] = curve.t.map((t, j) => [sx(t), sy(curve.p[j])]);
    prims.push({ kind: "polyline", points: clip(pts), color });
    const rateTag = curve.rate === null ? "" : ` rate=${fmt(curve.rate)}`;
    prims.push({
      kind: "text", x: ML + plotW + 6, y: MT + 40 + 14 * i,
      s: `${curve.label}${rateTag}`, color,
    });
  }

  if (spec.kind === "collapse" && manifest.master) {
    const { slope, spread } = manifest.master;
    const slopeTag = slope === null ? "slope: n/a" : `slope=${fmt(slope)}`;
    prims.push({
      kind: "text", x: ML + 8, y: MT + plotH - 10,
      s: `${slopeTag} spread=${fmt(spread)}`, color: "#000000",
    });
  }

  if (curves.every((c) => c.p.length <= 1)) {
    throw new FigureError("nothing to draw: all series empty");
  }
  return { width: W, height: H, prims };
}
