/** Statistics view: dataset summary panels, the projection scatter with
 * rectangle lasso selection, filter controls, and the what-if panel.
 * Selection logic and rendering are pure; main.ts wires them to the DOM. */

import { circleGlyph } from "./glyphs.js";
import { showLabelText } from "./colors.js";
import type { DatasetInfo, ProjectionPoint, WhatIfReport } from "./types.js";

export interface Rect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

function normalize(rect: Rect): Rect {
  return {
    x0: Math.min(rect.x0, rect.x1),
    y0: Math.min(rect.y0, rect.y1),
    x1: Math.max(rect.x0, rect.x1),
    y1: Math.max(rect.y0, rect.y1),
  };
}

/** Ids of the glyphs whose centers fall inside the lasso rectangle (view
 * coordinates in [0,1]^2; rectangle select is the documented fallback for
 * the freeform lasso). */
export function lassoSelect(points: ProjectionPoint[], rect: Rect): string[] {
  const r = normalize(rect);
  return points
    .filter((p) => p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1)
    .map((p) => p.id);
}

export function renderScatterSvg(
  points: ProjectionPoint[],
  datasetLabels: string[],
  width = 520,
  height = 520,
): string {
  const withText = showLabelText(datasetLabels);
  const glyphs = points.map((p) => {
    const g = circleGlyph(p, datasetLabels, width, height);
    const title = `<title>${p.id}</title>`;
    const ring = g.ringPath
      ? `<path d="${g.ringPath}" fill="none" stroke="${g.fill}" stroke-width="2"/>`
      : "";
    const text = withText && g.label
      ? `<text x="${g.cx + g.r + 4}" y="${g.cy + 3}" font-size="9">${g.label}</text>`
      : "";
    return (
      `<g class="glyph" data-id="${p.id}">` +
      `<circle cx="${g.cx}" cy="${g.cy}" r="${g.r}" fill="${g.fill}">${title}</circle>` +
      ring +
      text +
      `</g>`
    );
  });
  return (
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">` +
    glyphs.join("") +
    `</svg>`
  );
}

function pct(value: number | null): string {
  return value === null ? "undefined" : (100 * value).toFixed(2) + "%";
}

function delta(value: number | null): string {
  if (value === null) return "undefined";
  const sign = value >= 0 ? "+" : "";
  return sign + (100 * value).toFixed(2) + "pp";
}

export interface PanelLine {
  label: string;
  value: string;
}

/** Instances panel: counts and label distribution for the whole set and the
 * selected split. */
export function instancesPanel(info: DatasetInfo, split: string): PanelLine[] {
  const scope = split || "whole";
  const stats = info.stats[scope];
  const lines: PanelLine[] = [
    { label: "instances", value: String(stats.count) },
  ];
  for (const label of info.labels) {
    lines.push({
      label: `label ${label}`,
      value: `${stats.label_counts[label] ?? 0} (${pct(stats.label_fractions[label] ?? 0)})`,
    });
  }
  return lines;
}

export function machineAccuracyPanel(info: DatasetInfo, split: string): PanelLine[] {
  const scope = split || "whole";
  const stats = info.stats[scope];
  return Object.entries(stats.model_accuracy).map(([model, acc]) => ({
    label: model,
    value: pct(acc),
  }));
}

/** What-if panel lines; degenerate quantities render as "undefined", never 0. */
export function whatIfPanel(report: WhatIfReport | null): PanelLine[] {
  if (report === null) {
    return [{ label: "what-if", value: "lasso shortcuts to analyze" }];
  }
  const lines: PanelLine[] = [
    { label: "selected shortcuts", value: String(report.selection.shortcut_ids.length) },
    { label: "group coverage (dirty)", value: String(report.group_coverage) },
    { label: "clean instances", value: String(report.clean_ids.length) },
    { label: "disagreed instances", value: String(report.disagreed_count) },
    { label: "group productivity", value: pct(report.group_productivity) },
  ];
  const avg = report.accuracy.average;
  if (avg) {
    lines.push({ label: "accuracy (whole)", value: pct(avg.whole) });
    lines.push({ label: "accuracy (dirty)", value: `${pct(avg.dirty)} (${delta(avg.delta_dirty)})` });
    lines.push({ label: "accuracy (clean)", value: `${pct(avg.clean)} (${delta(avg.delta_clean)})` });
  }
  return lines;
}

/** Inline message for the 409 over-limit response: never a crash. */
export function overLimitMessage(detail: { survivors?: number; limit?: number }): string {
  const survivors = detail.survivors ?? "many";
  const limit = detail.limit ?? 300;
  return `${survivors} shortcuts exceed the ${limit}-glyph projection limit - tighten filters`;
}
