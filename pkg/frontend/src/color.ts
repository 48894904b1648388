/** Color rules shared with the report renderer on the service side.
 *
 * The probability bands must match the server's figures exactly: grey below
 * 0.1, yellow through 0.5, red above, each band linearly interpolated with
 * the endpoint-exact form a * (1 - t) + b * t.
 */

export type Rgb = [number, number, number];

const GREY_LO: Rgb = [0.92, 0.92, 0.92];
const GREY_HI: Rgb = [0.72, 0.72, 0.72];
const YELLOW_LO: Rgb = [1.0, 0.93, 0.55];
const YELLOW_HI: Rgb = [0.95, 0.62, 0.1];
const RED_LO: Rgb = [0.93, 0.35, 0.25];
const RED_HI: Rgb = [0.5, 0.0, 0.05];

function lerp(lo: Rgb, hi: Rgb, t: number): Rgb {
  return [
    lo[0] * (1.0 - t) + hi[0] * t,
    lo[1] * (1.0 - t) + hi[1] * t,
    lo[2] * (1.0 - t) + hi[2] * t,
  ];
}

/** RGB in [0, 1] for one class probability, by the three-band rule. */
export function probabilityColor(p: number): Rgb {
  p = Math.min(Math.max(p, 0.0), 1.0);
  if (p < 0.1) {
    return lerp(GREY_LO, GREY_HI, p / 0.1);
  }
  if (p <= 0.5) {
    return lerp(YELLOW_LO, YELLOW_HI, (p - 0.1) / 0.4);
  }
  return lerp(RED_LO, RED_HI, (p - 0.5) / 0.5);
}

/** Multi-hue ramp for confusion-matrix cells: purple over blue and green to
 * yellow, brightness rising with t in [0, 1]. */
const RAMP: Rgb[] = [
  [0.28, 0.13, 0.45],
  [0.17, 0.44, 0.56],
  [0.13, 0.66, 0.52],
  [0.48, 0.82, 0.32],
  [0.99, 0.91, 0.14],
];

export function countColor(t: number): Rgb {
  t = Math.min(Math.max(t, 0.0), 1.0);
  const span = RAMP.length - 1;
  const pos = t * span;
  const i = Math.min(Math.floor(pos), span - 1);
  return lerp(RAMP[i], RAMP[i + 1], pos - i);
}

/** CSS color string, channels rounded to 8-bit. */
export function cssColor(rgb: Rgb): string {
  const to255 = (v: number) => Math.round(Math.min(Math.max(v, 0), 1) * 255);
  return `rgb(${to255(rgb[0])},${to255(rgb[1])},${to255(rgb[2])})`;
}

/** Readable text color against the given fill. */
export function textColorOn(rgb: Rgb): string {
  const luma = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
  return luma > 0.55 ? "#222" : "#fff";
}

/** One distinguishable stroke per class, cycling after twelve. */
const CLASS_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#e377c2",
  "#bcbd22",
  "#7f7f7f",
  "#aec7e8",
  "#98df8a",
];

export function classColor(index: number): string {
  return CLASS_COLORS[index % CLASS_COLORS.length];
}
