export { FormatError, readPurityCsv, readRescaledCsv, readDistancesCsv, readGrid, readManifest } from "./formats.js";
export type { PuritySeries, DistanceRow, Grid, GridKind, Manifest, ManifestCell } from "./formats.js";
export { FigureError, outputFormat, validateSpec } from "./figure.js";
export type { FigureSpec, FigureKind } from "./figure.js";
export { buildPurityScene } from "./purity.js";
export { buildPhaseScene } from "./phase.js";
export { renderScene, renderSvg, renderRaster } from "./scene.js";
export type { Scene, Primitive, Heatmap } from "./scene.js";
export { encodePng, Raster } from "./png.js";
export { makeScale, sequential, diverging, curveColor } from "./color.js";
export type { ColorScale, Rgb } from "./color.js";
export { main } from "./cli.js";
