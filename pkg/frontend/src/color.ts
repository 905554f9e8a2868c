/** Color scales for the heatmap panels. */

export type Rgb = [number, number, number];

function lerpStops(stops: Rgb[], t: number): Rgb {
  const x = Math.min(1, Math.max(0, t)) * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(x));
  const f = x - i;
  const a = stops[i];
  const b = stops[i + 1];
  return [
    Math.round(a[0] + f * (b[0] - a[0])),
    Math.round(a[1] + f * (b[1] - a[1])),
    Math.round(a[2] + f * (b[2] - a[2])),
  ];
}

const SEQUENTIAL: Rgb[] = [
  [68, 1, 84],
  [70, 50, 127],
  [54, 92, 141],
  [39, 127, 142],
  [31, 161, 135],
  [74, 194, 109],
  [159, 218, 58],
  [253, 231, 37],
];

const DIVERGING: Rgb[] = [
  [33, 102, 172],
  [103, 169, 207],
  [209, 229, 240],
  [247, 247, 247],
  [253, 219, 199],
  [239, 138, 98],
  [178, 24, 43],
];

export function sequential(t: number): Rgb {
  return lerpStops(SEQUENTIAL, t);
}

export function diverging(t: number): Rgb {
  return lerpStops(DIVERGING, t);
}

export interface ColorScale {
  vmin: number;
  vmax: number;
  map(v: number): Rgb;
}

/** Zero-anchored scale for densities; symmetric diverging scale for signed data. */
export function makeScale(values: Float64Array[], signed: boolean): ColorScale {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of values) {
    for (const v of arr) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (signed) {
    const m = Math.max(Math.abs(lo), Math.abs(hi), 1e-300);
    return { vmin: -m, vmax: m, map: (v) => diverging((v + m) / (2 * m)) };
  }
  const top = hi > 0 ? hi : 1;
  return { vmin: 0, vmax: top, map: (v) => sequential(v / top) };
}

const CURVE_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
  "#bcbd22",
  "#e377c2",
];

export function curveColor(i: number): string {
  return CURVE_COLORS[i % CURVE_COLORS.length];
}

export function hexToRgb(hex: string): Rgb {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}
