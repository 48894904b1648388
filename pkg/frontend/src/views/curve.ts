/** Accuracy-over-window plot: blue step curve, hoverable markers, and the
 * series-length histograms (all series grey, test series yellow) on a
 * second axis below the curve. */

import { ConfusionPayload, CurvePayload } from "../api.js";
import { countColor, cssColor, textColorOn } from "../color.js";
import { el, line, rect, round2, scaleLinear, stepPath, svgRoot, text, ticks } from "../svg.js";

const MARGIN = { top: 16, right: 18, bottom: 34, left: 46 };
const HIST_BIN = 10;

export function renderAccuracyView(curve: CurvePayload, width = 760, height = 420): string {
  const innerW = width - MARGIN.left - MARGIN.right;
  const curveH = Math.round((height - MARGIN.top - MARGIN.bottom) * 0.72);
  const histH = height - MARGIN.top - MARGIN.bottom - curveH - 8;
  const histTop = MARGIN.top + curveH + 8;

  const windows = curve.windows;
  const lastWindow = windows[windows.length - 1];
  const bins = histBins(curve);
  const xMax = Math.max(lastWindow, ...bins.map((b) => b.start + HIST_BIN));
  const x = scaleLinear(0, xMax, MARGIN.left, MARGIN.left + innerW);
  const y = scaleLinear(0, 1, MARGIN.top + curveH, MARGIN.top);

  const parts: string[] = [];
  parts.push(axes(x, y, xMax, MARGIN.top + curveH));

  const pts: Array<[number, number]> = windows.map((w, i) => [x(w), y(curve.accuracy[i])]);
  parts.push(
    el("path", {
      d: stepPath(pts),
      fill: "none",
      stroke: "#1f77b4",
      "stroke-width": 2,
      class: "accuracy-line",
    }),
  );
  windows.forEach((w, i) => {
    parts.push(
      el("circle", {
        cx: round2(x(w)),
        cy: round2(y(curve.accuracy[i])),
        r: 4,
        fill: "#1f77b4",
        class: "accuracy-point",
        "data-window": w,
        "data-accuracy": curve.accuracy[i],
      }),
    );
  });

  const maxCount = Math.max(1, ...bins.map((b) => Math.max(b.all, b.test)));
  const hy = scaleLinear(0, maxCount, histTop + histH, histTop);
  for (const bin of bins) {
    const x0 = x(bin.start);
    const w = x(bin.start + HIST_BIN) - x0;
    parts.push(
      rect(x0 + 1, hy(bin.all), w - 2, histTop + histH - hy(bin.all), {
        fill: "#d0d0d0",
        class: "hist-all",
        "data-bin": bin.start,
      }),
    );
    if (bin.test > 0) {
      parts.push(
        rect(x0 + 1, hy(bin.test), w - 2, histTop + histH - hy(bin.test), {
          fill: "#e8c84d",
          class: "hist-test",
          "data-bin": bin.start,
        }),
      );
    }
  }
  parts.push(
    line(MARGIN.left, histTop + histH, MARGIN.left + innerW, histTop + histH, {
      stroke: "#444",
    }),
  );
  parts.push(
    text(MARGIN.left - 8, histTop + histH / 2, `≤${maxCount}`, {
      "text-anchor": "end",
      "font-size": 10,
      fill: "#666",
    }),
  );
  parts.push(
    text(MARGIN.left + innerW / 2, height - 6, "window length (steps)", {
      "text-anchor": "middle",
      "font-size": 11,
      fill: "#444",
    }),
  );

  return svgRoot(width, height, parts, "accuracy-view");
}

function histBins(curve: CurvePayload): Array<{ start: number; all: number; test: number }> {
  const starts = new Set<number>();
  for (const k of Object.keys(curve.hist_all)) {
    starts.add(Number(k));
  }
  for (const k of Object.keys(curve.hist_test)) {
    starts.add(Number(k));
  }
  return [...starts]
    .sort((a, b) => a - b)
    .map((start) => ({
      start,
      all: curve.hist_all[String(start)] ?? 0,
      test: curve.hist_test[String(start)] ?? 0,
    }));
}

function axes(
  x: (v: number) => number,
  y: (v: number) => number,
  xMax: number,
  baseline: number,
): string {
  const parts: string[] = [];
  for (const v of [0, 0.25, 0.5, 0.75, 1]) {
    parts.push(line(x(0), y(v), x(xMax), y(v), { stroke: "#e4e4e4" }));
    parts.push(
      text(x(0) - 6, y(v) + 3, v.toFixed(2), {
        "text-anchor": "end",
        "font-size": 10,
        fill: "#666",
      }),
    );
  }
  for (const v of ticks(0, xMax, 8)) {
    parts.push(
      text(x(v), baseline + 14, String(v), {
        "text-anchor": "middle",
        "font-size": 10,
        fill: "#666",
      }),
    );
    parts.push(line(x(v), baseline, x(v), baseline + 4, { stroke: "#444" }));
  }
  parts.push(line(x(0), baseline, x(xMax), baseline, { stroke: "#444" }));
  parts.push(line(x(0), y(1), x(0), baseline, { stroke: "#444" }));
  return parts.join("");
}

/** Popup shown over a hovered curve point: header facts plus the confusion
 * matrix as a colored count grid. */
export function renderConfusionPopup(
  cm: ConfusionPayload,
  shorterAll: number,
  shorterTest: number,
): string {
  const n = cm.classes.length;
  const cell = 32;
  const labelW = 74;
  const top = 22;
  const width = labelW + n * cell + 12;
  const height = top + n * cell + 30;
  const maxCount = Math.max(1, ...cm.counts.map((row) => Math.max(...row)));

  const parts: string[] = [];
  for (let j = 0; j < n; j++) {
    parts.push(
      text(labelW + j * cell + cell / 2, top - 8, shortLabel(cm.classes[j]), {
        "text-anchor": "middle",
        "font-size": 9,
        fill: "#444",
      }),
    );
  }
  for (let i = 0; i < n; i++) {
    parts.push(
      text(labelW - 6, top + i * cell + cell / 2 + 3, shortLabel(cm.classes[i]), {
        "text-anchor": "end",
        "font-size": 9,
        fill: "#444",
      }),
    );
    for (let j = 0; j < n; j++) {
      const count = cm.counts[i][j];
      const fill = countColor(count / maxCount);
      parts.push(
        rect(labelW + j * cell, top + i * cell, cell - 1, cell - 1, {
          fill: cssColor(fill),
          class: "confusion-cell",
          "data-true": cm.classes[i],
          "data-predicted": cm.classes[j],
          "data-count": count,
        }),
      );
      parts.push(
        text(labelW + j * cell + cell / 2, top + i * cell + cell / 2 + 4, String(count), {
          "text-anchor": "middle",
          "font-size": 11,
          fill: textColorOn(fill),
        }),
      );
    }
  }
  parts.push(
    text(labelW / 2, top + (n * cell) / 2, "true", {
      "text-anchor": "middle",
      "font-size": 10,
      fill: "#888",
      transform: `rotate(-90 ${labelW / 2} ${top + (n * cell) / 2})`,
    }),
  );
  parts.push(
    text(labelW + (n * cell) / 2, height - 8, "predicted", {
      "text-anchor": "middle",
      "font-size": 10,
      fill: "#888",
    }),
  );

  const header =
    `<div class="popup-title">window ${cm.window} · accuracy ` +
    `${(cm.accuracy * 100).toFixed(1)}%</div>` +
    `<div class="popup-sub">${shorterAll} series shorter than the window ` +
    `(${shorterTest} in the test split)</div>`;
  return `<div class="confusion-popup">${header}${svgRoot(width, height, parts)}</div>`;
}

function shortLabel(label: string): string {
  return label.length > 8 ? label.slice(0, 7) + "…" : label;
}
