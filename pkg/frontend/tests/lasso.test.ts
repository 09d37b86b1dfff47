import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { lassoSelect } from "../src/statistics_view.js";
import type { ProjectionPayload, WhatIfReport } from "../src/types.js";
import { fakeService, golden } from "./fixtures.js";

const projection = golden<ProjectionPayload>("mini_space_projection.json");

describe("lasso selection", () => {
  it("captures exactly the glyphs inside the rectangle", () => {
    const points = projection.points;
    // a rectangle around one known glyph center
    const target = points[0];
    const rect = {
      x0: target.x - 0.01,
      y0: target.y - 0.01,
      x1: target.x + 0.01,
      y1: target.y + 0.01,
    };
    const inside = points.filter(
      (p) =>
        p.x >= rect.x0 && p.x <= rect.x1 && p.y >= rect.y0 && p.y <= rect.y1,
    );
    expect(lassoSelect(points, rect)).toEqual(inside.map((p) => p.id));
  });

  it("normalizes inverted drag directions", () => {
    const all = { x0: 1, y0: 1, x1: 0, y1: 0 };
    expect(lassoSelect(projection.points, all)).toHaveLength(projection.points.length);
  });

  it("empty rectangle selects nothing", () => {
    expect(lassoSelect(projection.points, { x0: -2, y0: -2, x1: -1, y1: -1 })).toEqual([]);
  });
});

describe("lasso -> what-if request contract", () => {
  it("issues exactly one POST carrying exactly the k lassoed ids", async () => {
    const service = fakeService();
    const api = new ApiClient("", service.fetch);
    const k = 3;
    const ids = projection.points.slice(0, k).map((p) => p.id);
    const report = await api.whatif("mini_space", ids, "test");
    const posts = service.requests.filter((r) => r.method === "POST");
    expect(posts).toHaveLength(1);
    expect(posts[0].url).toBe("/datasets/mini_space/whatif");
    const body = posts[0].body as { shortcut_ids: string[]; split: string };
    expect(body.shortcut_ids).toEqual(ids);
    expect(body.shortcut_ids).toHaveLength(k);
    expect(body.split).toBe("test");
    expect((report as WhatIfReport).group_coverage).toBeGreaterThanOrEqual(0);
  });

  it("full lasso posts every visible glyph id once", async () => {
    const service = fakeService();
    const api = new ApiClient("", service.fetch);
    const ids = lassoSelect(projection.points, { x0: 0, y0: 0, x1: 1, y1: 1 });
    await api.whatif("mini_space", ids, null);
    const posts = service.requests.filter((r) => r.method === "POST");
    expect(posts).toHaveLength(1);
    const body = posts[0].body as { shortcut_ids: string[] };
    expect(new Set(body.shortcut_ids)).toEqual(new Set(projection.points.map((p) => p.id)));
    expect(body.shortcut_ids.length).toBe(projection.points.length);
  });
});
