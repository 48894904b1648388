/** Small string-building helpers for SVG output.
 *
 * Views are pure functions from API payloads to markup, so they can be
 * snapshot-tested without a DOM; the app shell injects the strings and wires
 * events by data attributes.
 */

export type Attrs = Record<string, string | number | undefined>;

export function escapeText(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attrString(attrs: Attrs): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(attrs)) {
    if (value !== undefined) {
      parts.push(`${key}="${escapeText(String(value))}"`);
    }
  }
  return parts.length ? " " + parts.join(" ") : "";
}

export function el(tag: string, attrs: Attrs, children: string[] | string = ""): string {
  const inner = Array.isArray(children) ? children.join("") : children;
  return inner === ""
    ? `<${tag}${attrString(attrs)}/>`
    : `<${tag}${attrString(attrs)}>${inner}</${tag}>`;
}

export function svgRoot(width: number, height: number, children: string[], cls?: string): string {
  return el(
    "svg",
    {
      xmlns: "http://www.w3.org/2000/svg",
      viewBox: `0 0 ${width} ${height}`,
      width,
      height,
      class: cls,
    },
    children,
  );
}

export function text(x: number, y: number, content: string, attrs: Attrs = {}): string {
  return el("text", { x: round2(x), y: round2(y), ...attrs }, escapeText(content));
}

export function line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): string {
  return el("line", { x1: round2(x1), y1: round2(y1), x2: round2(x2), y2: round2(y2), ...attrs });
}

export function rect(x: number, y: number, w: number, h: number, attrs: Attrs = {}): string {
  return el("rect", {
    x: round2(x),
    y: round2(y),
    width: round2(w),
    height: round2(h),
    ...attrs,
  });
}

export function circle(cx: number, cy: number, r: number, attrs: Attrs = {}): string {
  return el("circle", { cx: round2(cx), cy: round2(cy), r, ...attrs });
}

export function polylinePath(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${round2(x)} ${round2(y)}`)
    .join(" ");
}

/** Path for a step curve: horizontal segment to each next x, then vertical. */
export function stepPath(points: Array<[number, number]>): string {
  if (points.length === 0) {
    return "";
  }
  const [x0, y0] = points[0];
  let d = `M${round2(x0)} ${round2(y0)}`;
  for (let i = 1; i < points.length; i++) {
    const [x, y] = points[i];
    d += ` H${round2(x)} V${round2(y)}`;
  }
  return d;
}

export function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

/** Map a domain value onto a pixel range. */
export function scaleLinear(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): (v: number) => number {
  const span = d1 - d0;
  return (v: number) => (span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0));
}

/** Round axis ticks: at most n values at a step of 1/2/5 times a power of 10. */
export function ticks(lo: number, hi: number, n: number): number[] {
  if (!(hi > lo) || n < 1) {
    return [lo];
  }
  const raw = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.round(v * 1e6) / 1e6);
  }
  return out;
}
