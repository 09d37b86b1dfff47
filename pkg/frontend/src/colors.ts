/** Deterministic color assignment: POS tags hash into a categorical palette
 * (any tagset works, same tag always gets the same hue); binary true/false
 * labels use dark blue / red, other label sets fall back to the palette with
 * the label written beside the glyph. */

const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
  "#86bcb6", "#d37295", "#a0cbe8", "#ffbe7d", "#8cd17d",
  "#f1ce63", "#d4a6c8", "#fabfd2", "#d7b5a6", "#79706e",
];

const TRUE_COLOR = "#1f3a93"; // dark blue
const FALSE_COLOR = "#c0392b"; // red
const NEUTRAL = "#888888";

function hashString(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return h >>> 0;
}

export function posColor(pos: string): string {
  return PALETTE[hashString(pos) % PALETTE.length];
}

export function isBinaryTrueFalse(labels: string[]): boolean {
  return labels.length === 2 && labels.includes("true") && labels.includes("false");
}

export function labelColor(label: string | null, datasetLabels: string[]): string {
  if (label === null) return NEUTRAL;
  if (isBinaryTrueFalse(datasetLabels)) {
    return label === "true" ? TRUE_COLOR : FALSE_COLOR;
  }
  const index = datasetLabels.indexOf(label);
  return PALETTE[(index >= 0 ? index : hashString(label)) % PALETTE.length];
}

/** Non-binary label sets get the label text written next to the glyph. */
export function showLabelText(datasetLabels: string[]): boolean {
  return !isBinaryTrueFalse(datasetLabels);
}

export function legendEntries(posTags: string[]): Array<{ pos: string; color: string }> {
  return [...new Set(posTags)].sort().map((pos) => ({ pos, color: posColor(pos) }));
}
