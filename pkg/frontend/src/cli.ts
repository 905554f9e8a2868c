#!/usr/bin/env node
/**
 * Standalone figure renderer for simulation outputs.
 *
 * Usage:
 *   rotorpair-figures purity      --manifest out/manifest.json --out fig1.svg
 *   rotorpair-figures collapse    --manifest out/manifest.json --out fig1.png
 *   rotorpair-figures phase-space --manifest out/manifest.json --out fig2.png
 *
 * Optional: --xmin --xmax --ymin --ymax (purity/collapse axes).
 * Exit codes: 0 ok, 1 data or format error, 2 usage error.
 */

import { writeFileSync } from "node:fs";

import { FigureError, outputFormat, type FigureSpec } from "./figure.js";
import { FormatError } from "./formats.js";
import { buildPhaseScene } from "./phase.js";
import { buildPurityScene } from "./purity.js";
import { renderScene } from "./scene.js";

class UsageError extends Error {}

function parseArgs(argv: string[]): FigureSpec {
  const [kind, ...rest] = argv;
  if (kind !== "purity" && kind !== "collapse" && kind !== "phase-space") {
    throw new UsageError(`figure kind must be purity, collapse, or phase-space, got ${kind ?? "(none)"}`);
  }
  const flags = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new UsageError(`expected --flag value pairs, got ${rest.slice(i).join(" ")}`);
    }
    flags.set(key.slice(2), value);
  }
  const manifest = flags.get("manifest");
  const output = flags.get("out");
  if (!manifest || !output) {
    throw new UsageError("--manifest and --out are required");
  }
  const num = (name: string) => {
    const raw = flags.get(name);
    if (raw === undefined) return undefined;
    const v = Number(raw);
    if (Number.isNaN(v)) throw new UsageError(`--${name} must be a number`);
    return v;
  };
  const known = new Set(["manifest", "out", "xmin", "xmax", "ymin", "ymax"]);
  for (const key of flags.keys()) {
    if (!known.has(key)) throw new UsageError(`unknown flag --${key}`);
  }
  return {
    kind,
    manifest,
    output,
    xRange: { min: num("xmin"), max: num("xmax") },
    yRange: { min: num("ymin"), max: num("ymax") },
  };
}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const scene = spec.kind === "phase-space" ? buildPhaseScene(spec) : buildPurityScene(spec);
    const bytes = renderScene(scene, outputFormat(spec));
    writeFileSync(spec.output, bytes);
    console.log(`${spec.kind}: wrote ${spec.output} (${bytes.length} bytes)`);
    return 0;
  } catch (err) {
    if (err instanceof FigureError || err instanceof FormatError) {
      console.error(`figure error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
