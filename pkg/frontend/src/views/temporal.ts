/** Class-probability heatmap for one test series: rows are classes, columns
 * the window grid, cell colors follow the shared three-band rule. A hidden
 * dashed cursor line is included for the app to position on hover. */

import { TemporalPayload } from "../api.js";
import { cssColor, probabilityColor } from "../color.js";
import { el, line, rect, round2, svgRoot, text } from "../svg.js";

const MARGIN = { top: 30, right: 14, bottom: 30, left: 88 };

export function renderTemporalHeatmap(t: TemporalPayload, width = 760): string {
  const nClasses = t.classes.length;
  const nWindows = t.windows.length;
  const cellW = (width - MARGIN.left - MARGIN.right) / nWindows;
  const cellH = Math.min(34, Math.max(18, 260 / nClasses));
  const height = MARGIN.top + nClasses * cellH + MARGIN.bottom;

  const parts: string[] = [];
  parts.push(
    text(MARGIN.left, 14, `series ${t.series_id} · true label ${t.label} · length ${t.length}`, {
      "font-size": 12,
      fill: "#222",
      class: "temporal-title",
    }),
  );

  for (let ci = 0; ci < nClasses; ci++) {
    parts.push(
      text(MARGIN.left - 8, MARGIN.top + ci * cellH + cellH / 2 + 3, t.classes[ci], {
        "text-anchor": "end",
        "font-size": 10,
        fill: t.classes[ci] === t.label ? "#000" : "#555",
        "font-weight": t.classes[ci] === t.label ? "bold" : "normal",
      }),
    );
    for (let wi = 0; wi < nWindows; wi++) {
      const p = t.probs[ci][wi];
      parts.push(
        rect(MARGIN.left + wi * cellW, MARGIN.top + ci * cellH, cellW, cellH, {
          fill: cssColor(probabilityColor(p)),
          class: "temporal-cell",
          "data-window": t.windows[wi],
          "data-class": t.classes[ci],
          "data-p": p,
        }),
      );
    }
  }

  const step = Math.max(1, Math.ceil(nWindows / 14));
  for (let wi = 0; wi < nWindows; wi += step) {
    parts.push(
      text(MARGIN.left + wi * cellW + cellW / 2, height - 12, String(t.windows[wi]), {
        "text-anchor": "middle",
        "font-size": 9,
        fill: "#666",
      }),
    );
  }
  parts.push(
    text(MARGIN.left + (nWindows * cellW) / 2, height - 1, "window length (steps)", {
      "text-anchor": "middle",
      "font-size": 10,
      fill: "#444",
    }),
  );

  // cursor for the hover interaction; the app moves and reveals it
  parts.push(
    line(0, MARGIN.top, 0, MARGIN.top + nClasses * cellH, {
      stroke: "#333",
      "stroke-dasharray": "4 3",
      class: "temporal-cursor",
      visibility: "hidden",
    }),
  );

  return svgRoot(width, round2(height), parts, "temporal-view");
}

/** Tooltip body for a hovered window: every class probability, largest first. */
export function renderTemporalTooltip(t: TemporalPayload, windowIndex: number): string {
  const rows = t.classes
    .map((cls, ci) => ({ cls, p: t.probs[ci][windowIndex] }))
    .sort((a, b) => b.p - a.p)
    .map(({ cls, p }) =>
      el("tr", {}, [
        el("td", { class: "tooltip-class" }, cls),
        el("td", { class: "tooltip-p" }, p.toFixed(3)),
      ]),
    );
  return (
    `<div class="popup-title">window ${t.windows[windowIndex]}</div>` +
    el("table", { class: "tooltip-table" }, rows)
  );
}
