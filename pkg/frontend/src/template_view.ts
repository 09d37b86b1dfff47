/** Template view: block-glyph rows for the lassoed shortcuts, expandable in
 * place to show children; a radio button focuses a node for the instance
 * view. Split switches re-read per-split stats without re-mining. */

import { blockModel, renderBlocks, statBars } from "./glyphs.js";
import type { ShortcutSummary } from "./types.js";

export interface TemplateRow {
  id: string;
  depth: number;
  html: string;
  expandable: boolean;
  expanded: boolean;
  focused: boolean;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderRow(
  summary: ShortcutSummary,
  scope: string,
  maxCoverage: number,
  depth: number,
  expanded: boolean,
  focused: boolean,
): TemplateRow {
  const expandable = summary.child_ids.length > 0;
  const bars = statBars(summary, scope || "whole", maxCoverage);
  const stats = summary.stats[scope || "whole"] ?? summary.stats["whole"];
  const radio = `<input type="radio" name="focus" data-id="${summary.id}"${
    focused ? " checked" : ""
  }>`;
  const blocks = renderBlocks(blockModel(summary), expandable);
  const coverageBar =
    `<span class="bar cov" title="coverage ${stats.coverage}">` +
    `<span style="width:${(100 * bars.coverageFraction).toFixed(1)}%"></span></span>`;
  const productivityBar =
    `<span class="bar prod" title="productivity ${stats.productivity ?? "undefined"}">` +
    `<span style="width:${(100 * bars.productivityFraction).toFixed(1)}%"></span></span>`;
  const caret = expandable ? `<button class="expand" data-id="${summary.id}">${expanded ? "−" : "+"}</button>` : "";
  return {
    id: summary.id,
    depth,
    expandable,
    expanded,
    focused,
    html:
      `<div class="template-row" style="margin-left:${depth * 18}px" data-id="${summary.id}" ` +
      `title="${escapeHtml(summary.display)}">` +
      `${radio}${caret}${blocks}${coverageBar}${productivityBar}</div>`,
  };
}

/** Flatten the lassoed roots plus any expanded children into render order. */
export function buildRows(
  roots: ShortcutSummary[],
  childrenOf: Map<string, ShortcutSummary[]>,
  expandedIds: Set<string>,
  focusedId: string,
  scope: string,
): TemplateRow[] {
  const maxCoverage = Math.max(
    1,
    ...roots.map((s) => (s.stats[scope || "whole"] ?? s.stats["whole"]).coverage),
  );
  const rows: TemplateRow[] = [];
  const walk = (summary: ShortcutSummary, depth: number) => {
    const expanded = expandedIds.has(summary.id);
    rows.push(renderRow(summary, scope, maxCoverage, depth, expanded, summary.id === focusedId));
    if (expanded) {
      for (const child of childrenOf.get(summary.id) ?? []) {
        walk(child, depth + 1);
      }
    }
  };
  for (const root of roots) walk(root, 0);
  return rows;
}
