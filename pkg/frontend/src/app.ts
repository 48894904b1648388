/** Application shell: owns the DOM, the selection state, and all fetches.
 * Views stay pure (payload in, markup out); this module injects their output
 * and wires events through data attributes. */

import { ApiClient, CurvePayload, SweepInfo } from "./api.js";
import { classColor } from "./color.js";
import { debounce, FetchGuard, initialState, ViewState } from "./state.js";
import { renderAccuracyView, renderConfusionPopup } from "./views/curve.js";
import { renderPdpGrid } from "./views/pdp.js";
import { renderTemporalHeatmap, renderTemporalTooltip } from "./views/temporal.js";

const api = new ApiClient();
const state: ViewState = initialState();
const guard = new FetchGuard();

let sweeps: SweepInfo[] = [];
let currentCurve: CurvePayload | null = null;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function option(value: string, label = value): string {
  return `<option value="${value}">${label}</option>`;
}

async function loadCatalog(): Promise<void> {
  const [datasets, allSweeps] = await Promise.all([api.datasets(), api.sweeps()]);
  sweeps = allSweeps;
  const datasetSelect = byId<HTMLSelectElement>("dataset-select");
  datasetSelect.innerHTML = datasets.map((d) => option(d.id)).join("");
  if (!state.datasetId && datasets.length) {
    state.datasetId = datasets[0].id;
  }
  if (state.datasetId) {
    datasetSelect.value = state.datasetId;
  }
  refreshSweepSelect();
}

function refreshSweepSelect(): void {
  const select = byId<HTMLSelectElement>("sweep-select");
  const mine = sweeps.filter((s) => s.dataset_id === state.datasetId);
  select.innerHTML = mine
    .map((s) => option(s.id, `${s.id} (${s.n_trees} trees)`))
    .join("");
  const still = mine.find((s) => s.id === state.sweepId);
  state.sweepId = still ? still.id : mine.length ? mine[0].id : null;
  if (state.sweepId) {
    select.value = state.sweepId;
  }
  onSweepChanged();
}

function selectedSweep(): SweepInfo | null {
  return sweeps.find((s) => s.id === state.sweepId) ?? null;
}

function onSweepChanged(): void {
  const sweep = selectedSweep();
  byId("curve-panel").innerHTML = "";
  byId("temporal-panel").innerHTML = "";
  byId("pdp-panel").innerHTML = "";
  hidePopup();
  if (!sweep) {
    return;
  }
  const windowSelect = byId<HTMLSelectElement>("window-select");
  windowSelect.innerHTML = sweep.windows.map((w) => option(String(w))).join("");
  state.window = sweep.windows[sweep.windows.length - 1];
  windowSelect.value = String(state.window);
  state.hiddenClasses = new Set();
  renderClassToggles(sweep.classes);
  void loadCurve(sweep.id);
  void loadSeriesList(sweep.id);
  void loadPdp();
}

async function loadCurve(sweepId: string): Promise<void> {
  const token = guard.issue("curve");
  const curve = await api.curve(sweepId);
  if (!guard.isCurrent("curve", token)) {
    return;
  }
  currentCurve = curve;
  const panel = byId("curve-panel");
  panel.innerHTML = renderAccuracyView(curve);
  panel.querySelectorAll<SVGCircleElement>(".accuracy-point").forEach((node) => {
    node.addEventListener("mouseenter", (ev) => {
      const w = Number(node.dataset.window);
      hoverConfusion(w, ev as MouseEvent);
    });
    node.addEventListener("mouseleave", scheduleHidePopup);
  });
}

const hoverConfusion = debounce((window: number, ev: MouseEvent) => {
  void (async () => {
    if (!state.sweepId || !currentCurve) {
      return;
    }
    const token = guard.issue("confusion");
    const cm = await api.confusion(state.sweepId, window);
    if (!guard.isCurrent("confusion", token)) {
      return;
    }
    const wi = currentCurve.windows.indexOf(window);
    showPopup(
      renderConfusionPopup(
        cm,
        currentCurve.n_shorter_all[wi] ?? 0,
        currentCurve.n_shorter_test[wi] ?? 0,
      ),
      ev.pageX + 14,
      ev.pageY - 10,
    );
  })();
}, 150);

async function loadSeriesList(sweepId: string): Promise<void> {
  const token = guard.issue("series");
  const series = await api.series(sweepId);
  if (!guard.isCurrent("series", token)) {
    return;
  }
  const select = byId<HTMLSelectElement>("series-select");
  const test = series.filter((s) => s.split === "test");
  select.innerHTML = test.map((s) => option(s.id, `${s.id} (${s.label})`)).join("");
  state.seriesId = test.length ? test[0].id : null;
  if (state.seriesId) {
    select.value = state.seriesId;
    void loadTemporal();
  }
}

async function loadTemporal(): Promise<void> {
  if (!state.sweepId || !state.seriesId) {
    return;
  }
  const token = guard.issue("temporal");
  const payload = await api.temporal(state.sweepId, state.seriesId);
  if (!guard.isCurrent("temporal", token)) {
    return;
  }
  const panel = byId("temporal-panel");
  panel.innerHTML = renderTemporalHeatmap(payload);
  const cursor = panel.querySelector<SVGLineElement>(".temporal-cursor");
  panel.querySelectorAll<SVGRectElement>(".temporal-cell").forEach((node) => {
    node.addEventListener("mousemove", (ev) => {
      const wi = payload.windows.indexOf(Number(node.dataset.window));
      if (cursor) {
        const mid = Number(node.getAttribute("x")) + Number(node.getAttribute("width")) / 2;
        cursor.setAttribute("x1", String(mid));
        cursor.setAttribute("x2", String(mid));
        cursor.setAttribute("visibility", "visible");
      }
      showPopup(renderTemporalTooltip(payload, wi), ev.pageX + 14, ev.pageY - 10);
    });
    node.addEventListener("mouseleave", () => {
      cursor?.setAttribute("visibility", "hidden");
      scheduleHidePopup();
    });
  });
}

async function loadPdp(): Promise<void> {
  if (!state.sweepId || state.window === null) {
    return;
  }
  const token = guard.issue("pdp");
  byId("pdp-panel").innerHTML = '<p class="loading">computing substitution response…</p>';
  const payload = await api.pdp(state.sweepId, state.window, state.pdpGrid);
  if (!guard.isCurrent("pdp", token)) {
    return;
  }
  byId("pdp-panel").innerHTML = renderPdpGrid(payload, state.hiddenClasses);
}

function renderClassToggles(classes: string[]): void {
  const box = byId("class-toggles");
  box.innerHTML = classes
    .map(
      (cls, i) =>
        `<label class="class-toggle" style="border-left:10px solid ${classColor(i)}">` +
        `<input type="checkbox" data-class="${cls}" checked> ${cls}</label>`,
    )
    .join("");
  box.querySelectorAll<HTMLInputElement>("input[data-class]").forEach((input) => {
    input.addEventListener("change", () => {
      const cls = input.dataset.class as string;
      if (input.checked) {
        state.hiddenClasses.delete(cls);
      } else {
        state.hiddenClasses.add(cls);
      }
      void loadPdp();
    });
  });
}

let popupTimer: ReturnType<typeof setTimeout> | undefined;

function showPopup(html: string, x: number, y: number): void {
  if (popupTimer !== undefined) {
    clearTimeout(popupTimer);
    popupTimer = undefined;
  }
  const popup = byId("popup");
  popup.innerHTML = html;
  popup.style.left = `${x}px`;
  popup.style.top = `${y}px`;
  popup.style.display = "block";
}

function scheduleHidePopup(): void {
  popupTimer = setTimeout(hidePopup, 250);
}

function hidePopup(): void {
  byId("popup").style.display = "none";
}

async function startSweep(): Promise<void> {
  if (!state.datasetId) {
    return;
  }
  const status = byId("job-status");
  const body = {
    step: Number(byId<HTMLInputElement>("job-step").value) || 10,
    n_trees: Number(byId<HTMLInputElement>("job-trees").value) || 100,
    seed: Number(byId<HTMLInputElement>("job-seed").value) || 0,
  };
  try {
    const { job_id } = await api.startSweep(state.datasetId, body);
    status.textContent = "training…";
    const poll = setInterval(() => {
      void (async () => {
        const job = await api.job(job_id);
        if (job.phase === "done") {
          clearInterval(poll);
          status.textContent = "done";
          sweeps = await api.sweeps();
          refreshSweepSelect();
        } else if (job.phase === "error") {
          clearInterval(poll);
          status.textContent = `failed: ${job.error}`;
        } else {
          const pct = Math.round(job.progress * 100);
          status.textContent = `${job.phase} ${pct}% (window ${job.window ?? "-"})`;
        }
      })();
    }, 1000);
  } catch (err) {
    status.textContent = String(err);
  }
}

export function main(): void {
  byId<HTMLSelectElement>("dataset-select").addEventListener("change", (ev) => {
    state.datasetId = (ev.target as HTMLSelectElement).value;
    refreshSweepSelect();
  });
  byId<HTMLSelectElement>("sweep-select").addEventListener("change", (ev) => {
    state.sweepId = (ev.target as HTMLSelectElement).value;
    onSweepChanged();
  });
  byId<HTMLSelectElement>("series-select").addEventListener("change", (ev) => {
    state.seriesId = (ev.target as HTMLSelectElement).value;
    void loadTemporal();
  });
  byId<HTMLSelectElement>("window-select").addEventListener("change", (ev) => {
    state.window = Number((ev.target as HTMLSelectElement).value);
    void loadPdp();
  });
  byId<HTMLButtonElement>("job-start").addEventListener("click", () => {
    void startSweep();
  });
  void loadCatalog();
}

main();
