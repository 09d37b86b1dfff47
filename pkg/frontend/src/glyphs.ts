/** Glyph geometry: the circle glyph encodes coverage (radius), productivity
 * (outer arc angle), and prediction label (fill color); the block glyph
 * renders a template as one block per token position, white placeholders
 * standing in for the gap. */

import { labelColor, posColor } from "./colors.js";
import type { ProjectionPoint, ShortcutSummary, SlotInfo } from "./types.js";

export function arcAngleDegrees(fraction: number): number {
  return 360 * Math.min(1, Math.max(0, fraction));
}

/** SVG path for the productivity ring: starts at 12 o'clock, sweeps
 * clockwise by fraction * 360 degrees. Full circles are drawn as two arcs
 * since a single SVG arc cannot span 360 degrees. */
export function arcPath(cx: number, cy: number, r: number, fraction: number): string {
  const angle = arcAngleDegrees(fraction);
  if (angle <= 0) return "";
  if (angle >= 360) {
    return (
      `M ${cx} ${cy - r} A ${r} ${r} 0 1 1 ${cx} ${cy + r} ` +
      `A ${r} ${r} 0 1 1 ${cx} ${cy - r}`
    );
  }
  const end = ((angle - 90) * Math.PI) / 180;
  const x = cx + r * Math.cos(end);
  const y = cy + r * Math.sin(end);
  const largeArc = angle > 180 ? 1 : 0;
  return `M ${cx} ${cy - r} A ${r} ${r} 0 ${largeArc} 1 ${x} ${y}`;
}

export interface CircleGlyph {
  id: string;
  cx: number;
  cy: number;
  r: number;
  fill: string;
  ringPath: string;
  arcDegrees: number;
  label: string | null;
}

/** Map a projection point into pixel-space glyph geometry. */
export function circleGlyph(
  point: ProjectionPoint,
  datasetLabels: string[],
  width: number,
  height: number,
  ringOffset = 2.5,
): CircleGlyph {
  const scale = Math.min(width, height);
  const r = point.radius * scale;
  const fraction = point.arc ?? 0;
  const cx = point.x * width;
  const cy = point.y * height;
  return {
    id: point.id,
    cx,
    cy,
    r,
    fill: labelColor(point.label, datasetLabels),
    ringPath: arcPath(cx, cy, r + ringOffset, fraction),
    arcDegrees: arcAngleDegrees(fraction),
    label: point.label,
  };
}

export interface Block {
  kind: "slot" | "placeholder";
  pos?: string;
  color: string;
  text: string;
  aggregated: boolean;
  memberCount?: number;
  representative?: string;
}

function slotBlock(slot: SlotInfo): Block {
  if (slot.word_set) {
    return {
      kind: "slot",
      pos: slot.pos,
      color: posColor(slot.pos),
      text: slot.representative ?? "",
      aggregated: true,
      memberCount: slot.word_set.length,
      representative: slot.representative ?? "",
    };
  }
  return {
    kind: "slot",
    pos: slot.pos,
    color: posColor(slot.pos),
    text: slot.word ?? "",
    aggregated: false,
  };
}

/** One block per matched token position; the gap renders as white
 * placeholder blocks between the two slots. */
export function blockModel(summary: ShortcutSummary): Block[] {
  const blocks: Block[] = [slotBlock(summary.slots[0])];
  if (summary.slots.length === 2) {
    for (let i = 0; i < (summary.gap ?? 0); i++) {
      blocks.push({ kind: "placeholder", color: "#ffffff", text: "", aggregated: false });
    }
    blocks.push(slotBlock(summary.slots[1]));
  }
  return blocks;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** HTML for a template's block glyph; aggregates carry the triangle marker
 * with the member count, expandable nodes get a thicker border. */
export function renderBlocks(blocks: Block[], expandable: boolean): string {
  const border = expandable ? "2px solid #333" : "1px solid #bbb";
  const cells = blocks
    .map((block) => {
      const triangle = block.aggregated
        ? `<span class="agg-marker" title="${block.memberCount} aggregated words">&#9650;${block.memberCount}</span>`
        : "";
      const pos = block.pos ? `<span class="block-pos">${escapeHtml(block.pos)}</span>` : "";
      return (
        `<span class="block ${block.kind}" style="background:${block.color};border:${border}">` +
        `${triangle}${escapeHtml(block.text)}${pos}</span>`
      );
    })
    .join("");
  return `<span class="block-glyph">${cells}</span>`;
}

export interface Bars {
  coverageFraction: number;
  productivityFraction: number;
}

/** Coverage and productivity bars share scales across the listed nodes. */
export function statBars(
  summary: ShortcutSummary,
  scope: string,
  maxCoverage: number,
): Bars {
  const stats = summary.stats[scope] ?? summary.stats["whole"];
  return {
    coverageFraction: maxCoverage > 0 ? stats.coverage / maxCoverage : 0,
    productivityFraction: stats.productivity ?? 0,
  };
}
