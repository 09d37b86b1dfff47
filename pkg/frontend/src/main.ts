/** Browser entry point: wires the control panel and the three coordinated
 * views to the auditing service. All dataset state lives server-side; this
 * file only holds ViewState and re-renders on changes. Stale responses are
 * discarded via request-version guards. */

import { ApiClient, ApiError } from "./api.js";
import { lassoSelect, renderScatterSvg, instancesPanel, machineAccuracyPanel, whatIfPanel, overLimitMessage, Rect } from "./statistics_view.js";
import { buildRows } from "./template_view.js";
import { renderTable } from "./instance_view.js";
import { defaultState, parseState, serializeState, withFocus, ViewState } from "./state.js";
import type { DatasetInfo, ProjectionPoint, ShortcutSummary } from "./types.js";

const api = new ApiClient("");

let state: ViewState = window.location.search
  ? parseState(window.location.search.slice(1))
  : defaultState();
let datasets: DatasetInfo[] = [];
let points: ProjectionPoint[] = [];
let summaries = new Map<string, ShortcutSummary>();
let children = new Map<string, ShortcutSummary[]>();
let version = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function pushUrl(): void {
  history.replaceState(null, "", "?" + serializeState(state));
}

function currentDataset(): DatasetInfo | undefined {
  return datasets.find((d) => d.id === state.dataset);
}

async function refreshAll(): Promise<void> {
  const v = ++version;
  pushUrl();
  const info = currentDataset();
  if (!info) return;
  renderPanels(info);
  const filters = {
    minCoverage: state.minCoverage,
    minProductivity: state.minProductivity,
  };
  try {
    const payload = await api.projection(state.dataset, filters);
    if (v !== version) return;
    points = payload.points;
    el("scatter").innerHTML = renderScatterSvg(points, info.labels);
    el("scatter-message").textContent = "";
    attachLasso();
  } catch (err) {
    if (v !== version) return;
    if (err instanceof ApiError && err.status === 409) {
      el("scatter").innerHTML = "";
      el("scatter-message").textContent = overLimitMessage(
        err.detail as { survivors?: number; limit?: number },
      );
    } else {
      el("scatter-message").textContent = String(err);
    }
  }
  await refreshTemplates();
  await refreshWhatIf();
  await refreshInstances();
}

function renderPanels(info: DatasetInfo): void {
  const lines = (panel: { label: string; value: string }[]) =>
    panel.map((l) => `<div><span>${l.label}</span><b>${l.value}</b></div>`).join("");
  el("instances-panel").innerHTML = lines(instancesPanel(info, state.split));
  el("accuracy-panel").innerHTML = lines(machineAccuracyPanel(info, state.split));
}

function attachLasso(): void {
  const svg = el<HTMLElement>("scatter").querySelector("svg");
  if (!svg) return;
  let start: { x: number; y: number } | null = null;
  const toView = (event: MouseEvent) => {
    const box = svg.getBoundingClientRect();
    return {
      x: (event.clientX - box.left) / box.width,
      y: (event.clientY - box.top) / box.height,
    };
  };
  svg.addEventListener("mousedown", (event) => {
    start = toView(event);
  });
  svg.addEventListener("mouseup", async (event) => {
    if (!start) return;
    const end = toView(event);
    const rect: Rect = { x0: start.x, y0: start.y, x1: end.x, y1: end.y };
    start = null;
    const ids = lassoSelect(points, rect);
    state = withFocus({ ...state, lasso: ids, expanded: [] }, state.focused);
    pushUrl();
    await refreshTemplates();
    await refreshWhatIf();
    await refreshInstances();
  });
}

async function refreshWhatIf(): Promise<void> {
  const v = ++version;
  if (state.lasso.length === 0) {
    el("whatif-panel").innerHTML = whatIfPanel(null)
      .map((l) => `<div><span>${l.label}</span><b>${l.value}</b></div>`)
      .join("");
    return;
  }
  const report = await api.whatif(state.dataset, state.lasso, state.split || null);
  if (v !== version) return;
  el("whatif-panel").innerHTML = whatIfPanel(report)
    .map((l) => `<div><span>${l.label}</span><b>${l.value}</b></div>`)
    .join("");
}

async function refreshTemplates(): Promise<void> {
  const v = ++version;
  const listing = await api.shortcuts(state.dataset, {
    minCoverage: state.minCoverage,
    minProductivity: state.minProductivity,
    split: state.split || undefined,
  });
  if (v !== version) return;
  summaries = new Map(listing.shortcuts.map((s) => [s.id, s]));
  const roots = state.lasso.length
    ? state.lasso.flatMap((id) => (summaries.has(id) ? [summaries.get(id)!] : []))
    : listing.shortcuts;
  for (const id of state.expanded) {
    if (!children.has(id)) {
      const detail = await api.shortcutDetail(state.dataset, id);
      children.set(id, detail.children);
      for (const child of detail.children) summaries.set(child.id, child);
    }
  }
  const rows = buildRows(roots, children, new Set(state.expanded), state.focused, state.split);
  el("template-rows").innerHTML = rows.map((r) => r.html).join("");
  for (const button of el("template-rows").querySelectorAll("button.expand")) {
    button.addEventListener("click", async (event) => {
      const id = (event.currentTarget as HTMLElement).dataset.id!;
      state = {
        ...state,
        expanded: state.expanded.includes(id)
          ? state.expanded.filter((e) => e !== id)
          : [...state.expanded, id],
      };
      pushUrl();
      await refreshTemplates();
    });
  }
  for (const radio of el("template-rows").querySelectorAll("input[type=radio]")) {
    radio.addEventListener("change", async (event) => {
      const id = (event.currentTarget as HTMLElement).dataset.id!;
      state = { ...state, focused: id, query: { ...state.query, page: 1 } };
      pushUrl();
      await refreshInstances();
    });
  }
}

async function refreshInstances(): Promise<void> {
  const v = ++version;
  if (!state.focused) {
    el("instance-table").innerHTML = `<p class="empty">focus a shortcut to inspect instances</p>`;
    return;
  }
  const page = await api.instances(state.dataset, state.focused, state.query);
  if (v !== version) return;
  const info = currentDataset();
  el("instance-table").innerHTML = renderTable(page.rows, info ? info.models : []);
  el("instance-count").textContent = `${page.total} covered instances`;
}

function bindControls(): void {
  el<HTMLSelectElement>("dataset-select").addEventListener("change", async (event) => {
    state = { ...defaultState(), dataset: (event.target as HTMLSelectElement).value };
    await refreshAll();
  });
  el<HTMLInputElement>("min-coverage").addEventListener("change", async (event) => {
    state = { ...state, minCoverage: Number((event.target as HTMLInputElement).value) };
    await refreshAll();
  });
  el<HTMLInputElement>("min-productivity").addEventListener("change", async (event) => {
    state = { ...state, minProductivity: Number((event.target as HTMLInputElement).value) };
    await refreshAll();
  });
  el<HTMLSelectElement>("split-select").addEventListener("change", async (event) => {
    state = { ...state, split: (event.target as HTMLSelectElement).value };
    await refreshAll();
  });
  el<HTMLInputElement>("instance-search").addEventListener("change", async (event) => {
    state = {
      ...state,
      query: { ...state.query, search: (event.target as HTMLInputElement).value, page: 1 },
    };
    pushUrl();
    await refreshInstances();
  });
  el<HTMLSelectElement>("style-select").addEventListener("change", async (event) => {
    const style = (event.target as HTMLSelectElement).value === "neighbor" ? "neighbor" : "full";
    state = { ...state, query: { ...state.query, style } };
    pushUrl();
    await refreshInstances();
  });
  el<HTMLButtonElement>("sort-accuracy").addEventListener("click", async () => {
    const order = state.query.order === "asc" ? "desc" : "asc";
    state = { ...state, query: { ...state.query, sort: "accuracy", order } };
    pushUrl();
    await refreshInstances();
  });
}

async function boot(): Promise<void> {
  datasets = await api.datasets();
  const select = el<HTMLSelectElement>("dataset-select");
  select.innerHTML = datasets
    .map((d) => `<option value="${d.id}">${d.name} (${d.counts.total})</option>`)
    .join("");
  if (!state.dataset && datasets.length) state.dataset = datasets[0].id;
  select.value = state.dataset;
  const info = currentDataset();
  const splitSelect = el<HTMLSelectElement>("split-select");
  splitSelect.innerHTML =
    `<option value="">whole</option>` +
    (info ? info.splits.map((s) => `<option value="${s}">${s}</option>`).join("") : "");
  splitSelect.value = state.split;
  el<HTMLInputElement>("min-coverage").value = String(state.minCoverage);
  el<HTMLInputElement>("min-productivity").value = String(state.minProductivity);
  bindControls();
  await refreshAll();
}

boot().catch((err) => {
  document.body.insertAdjacentHTML("beforeend", `<pre class="fatal">${String(err)}</pre>`);
});
