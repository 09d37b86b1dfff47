import { describe, expect, it } from "vitest";

import { defaultState, parseState, serializeState, withFocus, ViewState } from "../src/state.js";

describe("view state URL round-trip", () => {
  it("restores an involved state identically", () => {
    const state: ViewState = {
      dataset: "mini_space",
      minCoverage: 8,
      minProductivity: 0.8,
      split: "test",
      lasso: ["aaa111", "bbb222"],
      expanded: ["ccc333"],
      focused: "aaa111",
      query: {
        search: "pang bian",
        split: "test",
        label: "true",
        style: "neighbor",
        sort: "accuracy",
        order: "desc",
        page: 3,
      },
    };
    const roundTripped = parseState(serializeState(state));
    expect(roundTripped).toEqual(state);
  });

  it("round-trips the default state", () => {
    const state = defaultState();
    expect(parseState(serializeState(state))).toEqual(state);
  });

  it("survives a second serialize/parse cycle byte-identically", () => {
    const state = defaultState();
    state.dataset = "d";
    state.lasso = ["x"];
    const once = serializeState(state);
    const twice = serializeState(parseState(once));
    expect(twice).toBe(once);
  });

  it("ignores malformed numeric params", () => {
    const state = parseState("ds=d&mc=not-a-number&page=-4");
    expect(state.minCoverage).toBe(5);
    expect(state.query.page).toBe(1);
  });
});

describe("focus invariant", () => {
  it("keeps focus only inside lasso or expanded sets", () => {
    const base = { ...defaultState(), lasso: ["a"], expanded: ["b"] };
    expect(withFocus(base, "a").focused).toBe("a");
    expect(withFocus(base, "b").focused).toBe("b");
    expect(withFocus(base, "stranger").focused).toBe("");
  });
});
