/**
 * Figure primitives with two interchangeable backends: an SVG writer
 * (vector) and a pixel rasterizer (PNG). Both consume the same scene, so
 * the two formats of a figure always agree, and the raster path avoids
 * every source of nondeterminism (no system fonts, no antialiasing).
 */

import { hexToRgb, type Rgb } from "./color.js";
import { encodePng, Raster } from "./png.js";

export interface Heatmap {
  width: number;
  height: number;
  /** row-major RGB, top row first */
  rgb: Uint8Array;
}

export type Primitive =
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string; dashed?: boolean; width?: number }
  | { kind: "polyline"; points: [number, number][]; color: string; width?: number }
  | { kind: "rect"; x: number; y: number; w: number; h: number; fill: string }
  | { kind: "frame"; x: number; y: number; w: number; h: number; color: string }
  | { kind: "text"; x: number; y: number; s: string; color: string; scale?: number; anchor?: "start" | "middle" | "end" }
  | { kind: "image"; x: number; y: number; w: number; h: number; map: Heatmap };

export interface Scene {
  width: number;
  height: number;
  prims: Primitive[];
}

// 5x7 bitmap glyphs, one hex value per row, bit 4 = leftmost column
const GLYPHS: Record<string, number[]> = {
  " ": [0, 0, 0, 0, 0, 0, 0],
  ".": [0, 0, 0, 0, 0, 0x0c, 0x0c],
  ",": [0, 0, 0, 0, 0x0c, 0x04, 0x08],
  "-": [0, 0, 0, 0x1f, 0, 0, 0],
  "=": [0, 0, 0x1f, 0, 0x1f, 0, 0],
  "/": [0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10],
  "(": [0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02],
  ")": [0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08],
  "+": [0, 0x04, 0x04, 0x1f, 0x04, 0x04, 0],
  ":": [0, 0x0c, 0x0c, 0, 0x0c, 0x0c, 0],
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  E: [0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f],
  K: [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
  N: [0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11],
  P: [0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10, 0x10],
  a: [0, 0, 0x0e, 0x01, 0x0f, 0x11, 0x0f],
  b: [0x10, 0x10, 0x1e, 0x11, 0x11, 0x11, 0x1e],
  c: [0, 0, 0x0e, 0x10, 0x10, 0x11, 0x0e],
  d: [0x01, 0x01, 0x0f, 0x11, 0x11, 0x11, 0x0f],
  e: [0, 0, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
  f: [0x06, 0x09, 0x08, 0x1c, 0x08, 0x08, 0x08],
  g: [0, 0x0f, 0x11, 0x11, 0x0f, 0x01, 0x0e],
  h: [0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11],
  i: [0x04, 0, 0x0c, 0x04, 0x04, 0x04, 0x0e],
  j: [0x02, 0, 0x06, 0x02, 0x02, 0x12, 0x0c],
  k: [0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12],
  l: [0x0c, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e],
  m: [0, 0, 0x1a, 0x15, 0x15, 0x15, 0x15],
  n: [0, 0, 0x16, 0x19, 0x11, 0x11, 0x11],
  o: [0, 0, 0x0e, 0x11, 0x11, 0x11, 0x0e],
  p: [0, 0, 0x1e, 0x11, 0x1e, 0x10, 0x10],
  q: [0, 0, 0x0f, 0x11, 0x0f, 0x01, 0x01],
  r: [0, 0, 0x16, 0x19, 0x10, 0x10, 0x10],
  s: [0, 0, 0x0e, 0x10, 0x0e, 0x01, 0x1e],
  t: [0x08, 0x08, 0x1c, 0x08, 0x08, 0x09, 0x06],
  u: [0, 0, 0x11, 0x11, 0x11, 0x13, 0x0d],
  v: [0, 0, 0x11, 0x11, 0x11, 0x0a, 0x04],
  w: [0, 0, 0x11, 0x11, 0x15, 0x15, 0x0a],
  x: [0, 0, 0x11, 0x0a, 0x04, 0x0a, 0x11],
  y: [0, 0, 0x11, 0x11, 0x0f, 0x01, 0x0e],
  z: [0, 0, 0x1f, 0x02, 0x04, 0x08, 0x1f],
};

const GLYPH_W = 6; // 5 columns + 1 spacing

export function textWidth(s: string, scale = 1): number {
  return s.length * GLYPH_W * scale;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(scene: Scene): string {
  const out: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
    `<rect width="${scene.width}" height="${scene.height}" fill="#ffffff"/>`,
  ];
  for (const p of scene.prims) {
    switch (p.kind) {
      case "line": {
        const dash = p.dashed ? ` stroke-dasharray="6,4"` : "";
        out.push(
          `<line x1="${p.x1}" y1="${p.y1}" x2="${p.x2}" y2="${p.y2}" stroke="${p.color}" stroke-width="${p.width ?? 1}"${dash}/>`
        );
        break;
      }
      case "polyline": {
        const pts = p.points.map(([x, y]) => `${x},${y}`).join(" ");
        out.push(
          `<polyline points="${pts}" fill="none" stroke="${p.color}" stroke-width="${p.width ?? 1.4}"/>`
        );
        break;
      }
      case "rect":
        out.push(`<rect x="${p.x}" y="${p.y}" width="${p.w}" height="${p.h}" fill="${p.fill}"/>`);
        break;
      case "frame":
        out.push(
          `<rect x="${p.x}" y="${p.y}" width="${p.w}" height="${p.h}" fill="none" stroke="${p.color}" stroke-width="1"/>`
        );
        break;
      case "text": {
        const size = 10 * (p.scale ?? 1);
        const anchor = p.anchor ?? "start";
        out.push(
          `<text x="${p.x}" y="${p.y}" font-family="monospace" font-size="${size}" fill="${p.color}" text-anchor="${anchor}">${esc(p.s)}</text>`
        );
        break;
      }
      case "image": {
        const raster = new Raster(p.map.width, p.map.height);
        raster.pixels.set(p.map.rgb);
        const uri = `data:image/png;base64,${encodePng(raster).toString("base64")}`;
        out.push(
          `<image x="${p.x}" y="${p.y}" width="${p.w}" height="${p.h}" preserveAspectRatio="none" image-rendering="pixelated" href="${uri}"/>`
        );
        break;
      }
    }
  }
  out.push("</svg>");
  return out.join("\n") + "\n";
}

function drawText(r: Raster, p: Extract<Primitive, { kind: "text" }>): void {
  const scale = Math.max(1, Math.round(p.scale ?? 1));
  const rgb = hexToRgb(p.color);
  const w = textWidth(p.s, scale);
  let cx = Math.round(p.x);
  if (p.anchor === "middle") cx -= Math.round(w / 2);
  if (p.anchor === "end") cx -= w;
  const top = Math.round(p.y) - 7 * scale; // SVG text y is the baseline
  for (const ch of p.s) {
    const glyph = GLYPHS[ch] ?? GLYPHS["."];
    for (let row = 0; row < 7; row++) {
      for (let col = 0; col < 5; col++) {
        if (glyph[row] & (1 << (4 - col))) {
          r.fillRect(cx + col * scale, top + row * scale, scale, scale, rgb);
        }
      }
    }
    cx += GLYPH_W * scale;
  }
}

export function renderRaster(scene: Scene): Raster {
  const r = new Raster(scene.width, scene.height);
  for (const p of scene.prims) {
    switch (p.kind) {
      case "line": {
        const rgb = hexToRgb(p.color);
        if (p.dashed) r.dashedLine(p.x1, p.y1, p.x2, p.y2, rgb);
        else r.line(p.x1, p.y1, p.x2, p.y2, rgb);
        break;
      }
      case "polyline": {
        const rgb = hexToRgb(p.color);
        for (let i = 1; i < p.points.length; i++) {
          r.line(p.points[i - 1][0], p.points[i - 1][1], p.points[i][0], p.points[i][1], rgb);
        }
        break;
      }
      case "rect":
        r.fillRect(Math.round(p.x), Math.round(p.y), Math.round(p.w), Math.round(p.h), hexToRgb(p.fill));
        break;
      case "frame": {
        const rgb = hexToRgb(p.color);
        r.line(p.x, p.y, p.x + p.w, p.y, rgb);
        r.line(p.x + p.w, p.y, p.x + p.w, p.y + p.h, rgb);
        r.line(p.x + p.w, p.y + p.h, p.x, p.y + p.h, rgb);
        r.line(p.x, p.y + p.h, p.x, p.y, rgb);
        break;
      }
      case "text":
        drawText(r, p);
        break;
      case "image": {
        // nearest-neighbor blit so cell boundaries stay exact
        for (let y = 0; y < p.h; y++) {
          const sy = Math.min(p.map.height - 1, Math.floor((y / p.h) * p.map.height));
          for (let x = 0; x < p.w; x++) {
            const sx = Math.min(p.map.width - 1, Math.floor((x / p.w) * p.map.width));
            const i = 3 * (sy * p.map.width + sx);
            r.set(Math.round(p.x) + x, Math.round(p.y) + y, [
              p.map.rgb[i],
              p.map.rgb[i + 1],
              p.map.rgb[i + 2],
            ]);
          }
        }
        break;
      }
    }
  }
  return r;
}

export function renderScene(scene: Scene, format: "svg" | "png"): Buffer {
  if (format === "svg") {
    return Buffer.from(renderSvg(scene), "utf-8");
  }
  return encodePng(renderRaster(scene));
}
