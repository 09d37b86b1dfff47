/** Instance view: covered instances of the focused shortcut as a table with
 * POS-colored highlighting, the Full/Neighbor text style toggle, and
 * search / split / label / accuracy-sort controls. All filtering and
 * sorting is delegated to the server via query parameters; this module only
 * renders what it is given. */

import { posColor } from "./colors.js";
import type { InstanceRow, InstanceToken } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Matched tokens get a POS-keyed background matching the template view. */
export function renderTokens(tokens: InstanceToken[]): string {
  return tokens
    .map((tok) => {
      if (tok.ellipsis) return `<span class="ellipsis">${escapeHtml(tok.t)}</span>`;
      if (!tok.hl) return `<span class="tok">${escapeHtml(tok.t)}</span>`;
      return (
        `<span class="tok hl" style="background:${posColor(tok.pos)}" ` +
        `title="${escapeHtml(tok.pos)}">${escapeHtml(tok.t)}</span>`
      );
    })
    .join(" ");
}

/** Visible (non-ellipsis) token surfaces, for tests and text export. */
export function visibleTokens(row: InstanceRow): string[] {
  return row.tokens.filter((t) => !t.ellipsis).map((t) => t.t);
}

export function highlightedTokens(row: InstanceRow): string[] {
  return row.tokens.filter((t) => t.hl).map((t) => t.t);
}

export function renderRow(row: InstanceRow, models: string[]): string {
  const accuracy = row.accuracy === null ? "–" : (100 * row.accuracy).toFixed(0) + "%";
  const marks = models
    .map((m) => {
      const ok = row.correct[m];
      if (ok === undefined) return `<td class="model">–</td>`;
      return `<td class="model ${ok ? "ok" : "bad"}">${ok ? "✓" : "✗"}</td>`;
    })
    .join("");
  return (
    `<tr data-id="${row.id}"><td class="text">${renderTokens(row.tokens)}</td>` +
    `<td>${escapeHtml(row.split)}</td><td>${escapeHtml(row.label)}</td>` +
    marks +
    `<td class="accuracy">${accuracy}</td></tr>`
  );
}

export function renderTable(rows: InstanceRow[], models: string[]): string {
  if (rows.length === 0) {
    return `<p class="empty">no covered instances match the current filters</p>`;
  }
  const header =
    `<tr><th>text</th><th>split</th><th>label</th>` +
    models.map((m) => `<th>${escapeHtml(m)}</th>`).join("") +
    `<th>accuracy</th></tr>`;
  return `<table class="instances">${header}${rows.map((r) => renderRow(r, models)).join("")}</table>`;
}
