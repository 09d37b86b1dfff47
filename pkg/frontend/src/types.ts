/** Payload types mirroring the auditing service's JSON responses. */

export interface SplitStats {
  coverage: number;
  label_distribution: Record<string, number>;
  prediction_label: string | null;
  productivity: number | null;
}

export interface SlotInfo {
  pos: string;
  word: string | null;
  word_set: string[] | null;
  representative: string | null;
}

export interface ShortcutSummary {
  id: string;
  template: string;
  display: string;
  selected: boolean;
  aggregated: boolean;
  word_set: string[] | null;
  representative: string | null;
  n_slots: number;
  gap: number | null;
  slots: SlotInfo[];
  parent_ids: string[];
  child_ids: string[];
  stats: Record<string, SplitStats>;
}

export interface ShortcutList {
  dataset_id: string;
  count: number;
  shortcuts: ShortcutSummary[];
}

export interface ShortcutDetail {
  node: ShortcutSummary;
  children: ShortcutSummary[];
}

export interface ProjectionPoint {
  id: string;
  x: number;
  y: number;
  radius: number;
  arc: number | null;
  label: string | null;
}

export interface ProjectionPayload {
  dataset_id: string;
  points: ProjectionPoint[];
}

export interface InstanceToken {
  t: string;
  pos: string;
  hl: boolean;
  ellipsis: boolean;
}

export interface InstanceRow {
  id: string;
  split: string;
  label: string;
  text: string;
  spans: number[][];
  tokens: InstanceToken[];
  correct: Record<string, boolean>;
  accuracy: number | null;
}

export interface InstancePage {
  total: number;
  page: number;
  page_size: number;
  rows: InstanceRow[];
}

export interface AccuracySet {
  whole: number | null;
  dirty: number | null;
  clean: number | null;
  delta_dirty: number | null;
  delta_clean: number | null;
}

export interface WhatIfReport {
  selection: { shortcut_ids: string[]; split: string | null };
  split_size: number;
  dirty_ids: string[];
  clean_ids: string[];
  group_coverage: number;
  disagreed_count: number;
  group_productivity: number | null;
  accuracy: {
    models: Record<string, AccuracySet>;
    average: AccuracySet | null;
  };
}

export interface DatasetStats {
  split: string | null;
  count: number;
  per_split_counts: Record<string, number>;
  label_counts: Record<string, number>;
  label_fractions: Record<string, number>;
  model_accuracy: Record<string, number>;
}

export interface DatasetInfo {
  id: string;
  name: string;
  counts: { total: number; per_split: Record<string, number> };
  splits: string[];
  labels: string[];
  models: string[];
  has_embeddings: boolean;
  stats: Record<string, DatasetStats>;
  provenance: unknown;
}
