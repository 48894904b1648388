/** Substitution-response small multiples: one subplot per channel, one
 * colored curve per visible class, probability axis fixed to [0, 1].
 *
 * Channels following the aperture naming convention (tia/tma/tra/tla times
 * x/y/z) are arranged as four aperture rows by three component columns;
 * anything else falls back to a near-square grid. */

import { PdpPayload } from "../api.js";
import { classColor } from "../color.js";
import { el, line, polylinePath, scaleLinear, svgRoot, text } from "../svg.js";

const APERTURES = ["tia", "tma", "tra", "tla"];
const COMPONENTS = ["x", "y", "z"];
const CONVENTION = APERTURES.flatMap((a) => COMPONENTS.map((c) => a + c));

export interface GridLayout {
  rows: number;
  cols: number;
}

export function pdpLayout(channels: string[]): GridLayout {
  if (channels.length === CONVENTION.length && channels.every((c, i) => c === CONVENTION[i])) {
    return { rows: APERTURES.length, cols: COMPONENTS.length };
  }
  const cols = Math.ceil(Math.sqrt(channels.length));
  return { rows: Math.ceil(channels.length / cols), cols };
}

const PLOT_W = 200;
const PLOT_H = 120;
const GAP_X = 26;
const GAP_Y = 34;
const MARGIN = { top: 26, right: 12, bottom: 26, left: 40 };

export function renderPdpGrid(pdp: PdpPayload, hiddenClasses: ReadonlySet<string>): string {
  const layout = pdpLayout(pdp.channels);
  const width = MARGIN.left + layout.cols * PLOT_W + (layout.cols - 1) * GAP_X + MARGIN.right;
  const height = MARGIN.top + layout.rows * PLOT_H + (layout.rows - 1) * GAP_Y + MARGIN.bottom;
  const gridLo = pdp.grid[0];
  const gridHi = pdp.grid[pdp.grid.length - 1];

  const parts: string[] = [];
  pdp.channels.forEach((channel, chIndex) => {
    const row = Math.floor(chIndex / layout.cols);
    const col = chIndex % layout.cols;
    const x0 = MARGIN.left + col * (PLOT_W + GAP_X);
    const y0 = MARGIN.top + row * (PLOT_H + GAP_Y);
    const x = scaleLinear(gridLo, gridHi, x0, x0 + PLOT_W);
    const y = scaleLinear(0, 1, y0 + PLOT_H, y0);

    const sub: string[] = [];
    sub.push(
      text(x0 + PLOT_W / 2, y0 - 7, channel, {
        "text-anchor": "middle",
        "font-size": 11,
        fill: "#222",
        class: "pdp-title",
      }),
    );
    for (const v of [0, 0.5, 1]) {
      sub.push(line(x0, y(v), x0 + PLOT_W, y(v), { stroke: "#ececec" }));
      if (col === 0) {
        sub.push(
          text(x0 - 5, y(v) + 3, v.toFixed(1), {
            "text-anchor": "end",
            "font-size": 9,
            fill: "#777",
          }),
        );
      }
    }
    sub.push(line(x0, y0 + PLOT_H, x0 + PLOT_W, y0 + PLOT_H, { stroke: "#555" }));
    sub.push(line(x0, y0, x0, y0 + PLOT_H, { stroke: "#555" }));
    for (const v of [gridLo, gridHi]) {
      sub.push(
        text(x(v), y0 + PLOT_H + 12, v.toFixed(2), {
          "text-anchor": "middle",
          "font-size": 9,
          fill: "#777",
        }),
      );
    }

    pdp.classes.forEach((cls, classIndex) => {
      if (hiddenClasses.has(cls)) {
        return;
      }
      const points: Array<[number, number]> = pdp.grid.map((g, gi) => [
        x(g),
        y(pdp.curves[chIndex][classIndex][gi]),
      ]);
      sub.push(
        el("path", {
          d: polylinePath(points),
          fill: "none",
          stroke: classColor(classIndex),
          "stroke-width": 1.6,
          class: "pdp-curve",
          "data-class": cls,
          "data-channel": channel,
        }),
      );
    });

    parts.push(el("g", { class: "pdp-subplot", "data-channel": channel }, sub));
  });

  return svgRoot(width, height, parts, "pdp-view");
}
