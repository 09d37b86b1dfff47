/** View state shared across the three coordinated views, serializable to the
 * URL query string so sessions are shareable and reloads restore the exact
 * rendered state. */

export interface InstanceQuery {
  search: string;
  split: string;
  label: string;
  style: "full" | "neighbor";
  sort: "" | "accuracy";
  order: "asc" | "desc";
  page: number;
}

export interface ViewState {
  dataset: string;
  minCoverage: number;
  minProductivity: number;
  split: string;
  /** shortcut ids captured by the current lasso selection */
  lasso: string[];
  /** expanded hierarchy node ids in the template view */
  expanded: string[];
  /** shortcut whose instances drive the instance view */
  focused: string;
  query: InstanceQuery;
}

export const DEFAULT_QUERY: InstanceQuery = {
  search: "",
  split: "",
  label: "",
  style: "full",
  sort: "",
  order: "asc",
  page: 1,
};

export function defaultState(): ViewState {
  return {
    dataset: "",
    minCoverage: 5,
    minProductivity: 0.75,
    split: "",
    lasso: [],
    expanded: [],
    focused: "",
    query: { ...DEFAULT_QUERY },
  };
}

/** The focused shortcut must live in the lasso selection or the expanded
 * hierarchy; anything else clears the focus. */
export function withFocus(state: ViewState, focused: string): ViewState {
  if (focused && !state.lasso.includes(focused) && !state.expanded.includes(focused)) {
    return { ...state, focused: "" };
  }
  return { ...state, focused };
}

export function serializeState(state: ViewState): string {
  const params = new URLSearchParams();
  const set = (key: string, value: string | number) => {
    const text = String(value);
    if (text !== "") params.set(key, text);
  };
  set("ds", state.dataset);
  set("mc", state.minCoverage);
  set("mp", state.minProductivity);
  set("split", state.split);
  if (state.lasso.length) set("lasso", state.lasso.join(","));
  if (state.expanded.length) set("exp", state.expanded.join(","));
  set("focus", state.focused);
  const q = state.query;
  set("q", q.search);
  set("qsplit", q.split);
  set("qlabel", q.label);
  if (q.style !== DEFAULT_QUERY.style) set("style", q.style);
  if (q.sort) set("sort", q.sort);
  if (q.order !== DEFAULT_QUERY.order) set("order", q.order);
  if (q.page !== 1) set("page", q.page);
  return params.toString();
}

export function parseState(queryString: string): ViewState {
  const params = new URLSearchParams(queryString);
  const state = defaultState();
  const text = (key: string, fallback: string) => params.get(key) ?? fallback;
  const num = (key: string, fallback: number) => {
    const raw = params.get(key);
    const value = raw === null ? NaN : Number(raw);
    return Number.isFinite(value) ? value : fallback;
  };
  state.dataset = text("ds", "");
  state.minCoverage = num("mc", state.minCoverage);
  state.minProductivity = num("mp", state.minProductivity);
  state.split = text("split", "");
  state.lasso = params.get("lasso")?.split(",").filter(Boolean) ?? [];
  state.expanded = params.get("exp")?.split(",").filter(Boolean) ?? [];
  state.focused = text("focus", "");
  state.query = {
    search: text("q", ""),
    split: text("qsplit", ""),
    label: text("qlabel", ""),
    style: text("style", DEFAULT_QUERY.style) === "neighbor" ? "neighbor" : "full",
    sort: text("sort", "") === "accuracy" ? "accuracy" : "",
    order: text("order", DEFAULT_QUERY.order) === "desc" ? "desc" : "asc",
    page: Math.max(1, Math.trunc(num("page", 1))),
  };
  return state;
}
