/** Thin client over the auditing service; every view reads through here so
 * the whole UI state flows from the HTTP surface. The fetch function is
 * injectable for fixture-backed tests. */

import type {
  DatasetInfo,
  InstancePage,
  ProjectionPayload,
  ShortcutDetail,
  ShortcutList,
  WhatIfReport,
} from "./types.js";
import type { InstanceQuery } from "./state.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ShortcutFilters {
  minCoverage?: number;
  minProductivity?: number;
  split?: string;
}

function filterParams(filters: ShortcutFilters): URLSearchParams {
  const params = new URLSearchParams();
  if (filters.minCoverage !== undefined) params.set("min_coverage", String(filters.minCoverage));
  if (filters.minProductivity !== undefined) {
    params.set("min_productivity", String(filters.minProductivity));
  }
  if (filters.split) params.set("split", filters.split);
  return params;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`service responded ${status}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    const body = await response.json();
    if (!response.ok) throw new ApiError(response.status, body.detail ?? body);
    return body as T;
  }

  datasets(): Promise<DatasetInfo[]> {
    return this.getJson("/datasets");
  }

  shortcuts(datasetId: string, filters: ShortcutFilters = {}): Promise<ShortcutList> {
    const params = filterParams(filters);
    const suffix = params.size ? `?${params}` : "";
    return this.getJson(`/datasets/${datasetId}/shortcuts${suffix}`);
  }

  shortcutDetail(datasetId: string, shortcutId: string): Promise<ShortcutDetail> {
    return this.getJson(`/datasets/${datasetId}/shortcuts/${shortcutId}`);
  }

  projection(datasetId: string, filters: ShortcutFilters = {}): Promise<ProjectionPayload> {
    const params = filterParams(filters);
    const suffix = params.size ? `?${params}` : "";
    return this.getJson(`/datasets/${datasetId}/projection${suffix}`);
  }

  instances(
    datasetId: string,
    shortcutId: string,
    query: Partial<InstanceQuery> = {},
    pageSize = 50,
  ): Promise<InstancePage> {
    const params = new URLSearchParams();
    if (query.search) params.set("search", query.search);
    if (query.split) params.set("split", query.split);
    if (query.label) params.set("label", query.label);
    if (query.style) params.set("style", query.style);
    if (query.sort) {
      params.set("sort", query.sort);
      params.set("order", query.order ?? "asc");
    }
    params.set("page", String(query.page ?? 1));
    params.set("page_size", String(pageSize));
    return this.getJson(
      `/datasets/${datasetId}/shortcuts/${shortcutId}/instances?${params}`,
    );
  }

  /** One POST per selection; the body carries exactly the lassoed ids. */
  async whatif(datasetId: string, shortcutIds: string[], split: string | null): Promise<WhatIfReport> {
    const response = await this.fetchFn(`${this.baseUrl}/datasets/${datasetId}/whatif`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ shortcut_ids: shortcutIds, split }),
    });
    const body = await response.json();
    if (!response.ok) throw new ApiError(response.status, body.detail ?? body);
    return body as WhatIfReport;
  }

  async removal(datasetId: string, shortcutIds: string[], split: string | null): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}/datasets/${datasetId}/removal`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ shortcut_ids: shortcutIds, split }),
    });
    const body = await response.json();
    if (!response.ok) throw new ApiError(response.status, body.detail ?? body);
    return body;
  }
}
