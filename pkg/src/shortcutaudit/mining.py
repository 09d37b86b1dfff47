"""Exhaustive template enumeration, statistics accumulation, threshold
filtering, and hierarchy construction.

The accumulator works on compact tuple keys rather than Template objects:
``(pos, word)`` for one-slot templates and ``(pos1, word1, gap, pos2, word2)``
for two-slot templates, with ``None`` standing for an unconstrained word.
Template objects are only materialized for the nodes that end up in the
artifact (selected shortcuts, their ancestor paths, and their children).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import AnnotatedInstance, Dataset
from .templates import Slot, Template, canonical, display, parse, template_id

TemplateKey = tuple
ROOT_ID = "root"


@dataclass
class MiningConfig:
    min_coverage_whole: int = 1
    min_productivity_whole: float = 0.0
    per_split_minima: dict[str, tuple[int, float]] = field(default_factory=dict)
    max_gap: int | None = None
    case_fold: bool = False
    coverage_floor: int = 2

    def __post_init__(self) -> None:
        if self.min_coverage_whole < 1:
            raise ValueError("min_coverage_whole must be >= 1")
        if not 0.0 <= self.min_productivity_whole <= 1.0:
            raise ValueError("min_productivity_whole must be in [0, 1]")
        for split, (cov, prod) in self.per_split_minima.items():
            if cov < 0 or not 0.0 <= prod <= 1.0:
                raise ValueError(f"invalid per-split minima for {split!r}")
        if self.max_gap is not None and self.max_gap < 0:
            raise ValueError("max_gap must be non-negative")

    def to_json(self) -> dict:
        return {
            "min_coverage_whole": self.min_coverage_whole,
            "min_productivity_whole": self.min_productivity_whole,
            "per_split_minima": {s: list(v) for s, v in self.per_split_minima.items()},
            "max_gap": self.max_gap,
            "case_fold": self.case_fold,
            "coverage_floor": self.coverage_floor,
        }

    @classmethod
    def from_json(cls, data: dict) -> MiningConfig:
        return cls(
            min_coverage_whole=data["min_coverage_whole"],
            min_productivity_whole=data["min_productivity_whole"],
            per_split_minima={s: (v[0], v[1]) for s, v in data.get("per_split_minima", {}).items()},
            max_gap=data.get("max_gap"),
            case_fold=data.get("case_fold", False),
            coverage_floor=data.get("coverage_floor", 2),
        )

    @property
    def hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class SplitStats:
    coverage: int
    label_distribution: dict[str, int]
    prediction_label: str | None
    productivity: float | None

    def to_json(self) -> dict:
        return {
            "coverage": self.coverage,
            "label_distribution": self.label_distribution,
            "prediction_label": self.prediction_label,
            "productivity": self.productivity,
        }

    @classmethod
    def from_json(cls, data: dict) -> SplitStats:
        return cls(
            coverage=data["coverage"],
            label_distribution=dict(data["label_distribution"]),
            prediction_label=data["prediction_label"],
            productivity=data["productivity"],
        )


@dataclass
class ShortcutNode:
    id: str
    template: Template
    stats: dict[str, SplitStats]
    parent_ids: list[str] = field(default_factory=list)
    child_ids: list[str] = field(default_factory=list)
    selected: bool = False
    aggregated: bool = False
    covered_ids: set[str] = field(default_factory=set)

    @property
    def whole(self) -> SplitStats:
        return self.stats["whole"]


def _key_parents(key: TemplateKey) -> list[TemplateKey]:
    if len(key) == 2:
        pos, word = key
        return [(pos, None)] if word is not None else []
    pos1, w1, gap, pos2, w2 = key
    out: list[TemplateKey] = []
    if w1 is not None:
        out.append((pos1, None, gap, pos2, w2))
    if w2 is not None:
        out.append((pos1, w1, gap, pos2, None))
    out.append((pos1, w1))
    out.append((pos2, w2))
    return out


def template_from_key(key: TemplateKey) -> Template:
    if len(key) == 2:
        return Template(slots=(Slot(pos=key[0], word=key[1]),))
    pos1, w1, gap, pos2, w2 = key
    return Template(slots=(Slot(pos=pos1, word=w1), Slot(pos=pos2, word=w2)), gap=gap)


def key_from_template(template: Template) -> TemplateKey:
    for slot in template.slots:
        if slot.word_set is not None:
            raise ValueError("aggregate templates have no accumulator key")
    if len(template.slots) == 1:
        s = template.slots[0]
        return (s.pos, s.word)
    s1, s2 = template.slots
    return (s1.pos, s1.word, template.gap, s2.pos, s2.word)


def _token_pairs(instance: AnnotatedInstance, case_fold: bool) -> list[tuple[str, str]]:
    if case_fold:
        return [(t.pos, t.surface.casefold()) for t in instance.tokens]
    return [(t.pos, t.surface) for t in instance.tokens]


def instance_template_keys(
    tokens: list[tuple[str, str]], max_gap: int | None
) -> set[TemplateKey]:
    """Every template key an instance gives rise to: both one-slot variants
    per position, all four word-specificity combinations per ordered pair."""
    keys: set[TemplateKey] = set()
    add = keys.add
    n = len(tokens)
    for p in range(n):
        pos_p, w_p = tokens[p]
        add((pos_p, None))
        add((pos_p, w_p))
        q_end = n if max_gap is None else min(n, p + max_gap + 2)
        for q in range(p + 1, q_end):
            pos_q, w_q = tokens[q]
            g = q - p - 1
            add((pos_p, None, g, pos_q, None))
            add((pos_p, w_p, g, pos_q, None))
            add((pos_p, None, g, pos_q, w_q))
            add((pos_p, w_p, g, pos_q, w_q))
    return keys


def enumerate_templates(instance: AnnotatedInstance, config: MiningConfig) -> set[Template]:
    keys = instance_template_keys(_token_pairs(instance, config.case_fold), config.max_gap)
    return {template_from_key(k) for k in keys}


class Accumulation:
    """Map from template key to the (sorted) indices of covered instances.

    Each instance contributes its local template-key set once, so coverage
    counts an instance at most once regardless of match multiplicity.
    """

    def __init__(self, dataset: Dataset, config: MiningConfig):
        self.dataset = dataset
        self.config = config
        self._covered: dict[TemplateKey, list[int]] = {}
        self._labels = [inst.label for inst in dataset.instances]
        self._splits = [inst.split for inst in dataset.instances]
        self._ids = [inst.id for inst in dataset.instances]

    def add_instance(self, idx: int, instance: AnnotatedInstance) -> None:
        keys = instance_template_keys(
            _token_pairs(instance, self.config.case_fold), self.config.max_gap
        )
        covered = self._covered
        for key in keys:
            lst = covered.get(key)
            if lst is None:
                covered[key] = [idx]
            else:
                lst.append(idx)

    def __len__(self) -> int:
        return len(self._covered)

    def __contains__(self, key: TemplateKey) -> bool:
        return key in self._covered

    def keys(self):
        return self._covered.keys()

    def covered_indices(self, key: TemplateKey) -> list[int]:
        return self._covered[key]

    def covered_ids(self, key: TemplateKey) -> set[str]:
        return {self._ids[i] for i in self._covered[key]}

    def coverage(self, key: TemplateKey) -> int:
        return len(self._covered[key])

    def stats(self, key: TemplateKey) -> dict[str, SplitStats]:
        return self.stats_for_indices(self._covered[key])

    def stats_for_indices(self, indices) -> dict[str, SplitStats]:
        """Whole-set plus per-split statistics for a covered-index set."""
        labels = self._labels
        splits = self._splits
        label_order = self.dataset.labels
        whole: dict[str, int] = {}
        per_split: dict[str, dict[str, int]] = {s: {} for s in self.dataset.splits}
        for i in indices:
            label = labels[i]
            whole[label] = whole.get(label, 0) + 1
            d = per_split[splits[i]]
            d[label] = d.get(label, 0) + 1
        out = {"whole": _finish_stats(whole, label_order)}
        for s in self.dataset.splits:
            out[s] = _finish_stats(per_split[s], label_order)
        return out

    def passes(self, key: TemplateKey) -> bool:
        if len(self._covered[key]) < self.config.min_coverage_whole:
            return False
        return passes_thresholds(self.stats(key), self.config)


def _dominant_label(dist: dict[str, int], label_order: list[str]) -> str:
    """Argmax of the label distribution; ties broken by dataset label order."""
    best: str | None = None
    best_count = -1
    for label in label_order:
        count = dist.get(label, 0)
        if count > best_count:
            best, best_count = label, count
    if best is None:  # label outside the declared order; deterministic fallback
        best = min(dist, key=lambda lb: (-dist[lb], lb))
    return best


def stats_for_ids(dataset: Dataset, instance_ids) -> dict[str, SplitStats]:
    """Whole-set plus per-split statistics for an arbitrary instance-id set."""
    whole: dict[str, int] = {}
    per_split: dict[str, dict[str, int]] = {s: {} for s in dataset.splits}
    for iid in instance_ids:
        inst = dataset.get(iid)
        whole[inst.label] = whole.get(inst.label, 0) + 1
        d = per_split[inst.split]
        d[inst.label] = d.get(inst.label, 0) + 1
    out = {"whole": _finish_stats(whole, dataset.labels)}
    for s in dataset.splits:
        out[s] = _finish_stats(per_split[s], dataset.labels)
    return out


def _finish_stats(dist: dict[str, int], label_order: list[str]) -> SplitStats:
    coverage = sum(dist.values())
    if coverage == 0:
        return SplitStats(0, {}, None, None)
    pred = _dominant_label(dist, label_order)
    return SplitStats(coverage, dist, pred, dist[pred] / coverage)


def passes_thresholds(stats: dict[str, SplitStats], config: MiningConfig) -> bool:
    """Whole-set minima plus any configured per-split minima."""
    whole = stats["whole"]
    if whole.coverage < config.min_coverage_whole:
        return False
    if whole.productivity is None or whole.productivity < config.min_productivity_whole:
        return False
    for split, (min_cov, min_prod) in config.per_split_minima.items():
        ss = stats.get(split)
        if ss is None or ss.coverage < min_cov:
            return False
        if min_prod > 0 and (ss.productivity is None or ss.productivity < min_prod):
            return False
    return True


def accumulate(dataset: Dataset, config: MiningConfig) -> Accumulation:
    acc = Accumulation(dataset, config)
    for idx, inst in enumerate(dataset.instances):
        acc.add_instance(idx, inst)
    return acc


def filter_shortcuts(acc: Accumulation, config: MiningConfig | None = None) -> list[ShortcutNode]:
    """Selected shortcut nodes (no hierarchy links yet), ordered by id."""
    del config  # thresholds live on the accumulation's config
    nodes = []
    for key in acc.keys():
        if acc.passes(key):
            nodes.append(_make_node(acc, key, selected=True))
    nodes.sort(key=lambda n: n.id)
    return nodes


def _make_node(acc: Accumulation, key: TemplateKey, selected: bool) -> ShortcutNode:
    template = template_from_key(key)
    return ShortcutNode(
        id=template_id(template),
        template=template,
        stats=acc.stats(key),
        selected=selected,
        covered_ids=acc.covered_ids(key),
    )


def build_hierarchy(selected: list[ShortcutNode], acc: Accumulation) -> MinedArtifact:
    """Organize selected nodes into the parent lattice under a virtual root.

    The graph contains every selected node, every node on a parents-path from
    a selected node up to the root, and the direct children of selected nodes
    whose coverage clears the floor.
    """
    selected_keys = {key_from_template(n.template) for n in selected}
    node_keys: set[TemplateKey] = set(selected_keys)

    frontier = list(selected_keys)
    while frontier:
        nxt = []
        for key in frontier:
            for pk in _key_parents(key):
                if pk not in node_keys:
                    node_keys.add(pk)
                    nxt.append(pk)
        frontier = nxt

    floor = max(1, acc.config.coverage_floor)
    if selected_keys:
        for key in acc.keys():
            if key in node_keys or len(acc.covered_indices(key)) < floor:
                continue
            for pk in _key_parents(key):
                if pk in selected_keys:
                    node_keys.add(key)
                    break

    by_key: dict[TemplateKey, ShortcutNode] = {key_from_template(n.template): n for n in selected}
    for key in node_keys:
        if key not in by_key:
            by_key[key] = _make_node(acc, key, selected=False)

    nodes: dict[str, ShortcutNode] = {}
    for key, node in by_key.items():
        parent_ids = []
        for pk in _key_parents(key):
            parent = by_key.get(pk)
            if parent is not None:
                parent_ids.append(parent.id)
        node.parent_ids = sorted(set(parent_ids))
        node.child_ids = []
        nodes[node.id] = node
    for key, node in by_key.items():
        for pid in node.parent_ids:
            nodes[pid].child_ids.append(node.id)
    root_ids = []
    for node in nodes.values():
        node.child_ids = sorted(set(node.child_ids))
        if not node.parent_ids:
            root_ids.append(node.id)
    return MinedArtifact(
        dataset_name=acc.dataset.name,
        dataset_fingerprint=acc.dataset.fingerprint,
        config=acc.config,
        nodes=nodes,
        root_ids=sorted(root_ids),
    )


def mine(dataset: Dataset, config: MiningConfig) -> MinedArtifact:
    """Full pipeline: enumerate, accumulate, filter, organize. Deterministic."""
    acc = accumulate(dataset, config)
    selected = filter_shortcuts(acc)
    return build_hierarchy(selected, acc)


@dataclass
class MinedArtifact:
    dataset_name: str
    dataset_fingerprint: str
    config: MiningConfig
    nodes: dict[str, ShortcutNode]
    root_ids: list[str]

    def selected_nodes(self) -> list[ShortcutNode]:
        return sorted((n for n in self.nodes.values() if n.selected), key=lambda n: n.id)

    def node(self, node_id: str) -> ShortcutNode:
        return self.nodes[node_id]

    def has_template(self, template: Template) -> bool:
        return template_id(template) in self.nodes

    def is_stale_for(self, dataset: Dataset) -> bool:
        return self.dataset_fingerprint != dataset.fingerprint

    def to_json(self) -> dict:
        node_records = []
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            node_records.append(
                {
                    "id": node.id,
                    "template": canonical(node.template),
                    "display": display(node.template),
                    "selected": node.selected,
                    "aggregated": node.aggregated,
                    "parent_ids": node.parent_ids,
                    "child_ids": node.child_ids,
                    "covered_ids": sorted(node.covered_ids),
                    "stats": {scope: ss.to_json() for scope, ss in sorted(node.stats.items())},
                }
            )
        return {
            "format": "shortcutaudit-artifact-v1",
            "dataset_name": self.dataset_name,
            "dataset_fingerprint": self.dataset_fingerprint,
            "config": self.config.to_json(),
            "root_ids": self.root_ids,
            "nodes": node_records,
        }

    @classmethod
    def from_json(cls, data: dict) -> MinedArtifact:
        if data.get("format") != "shortcutaudit-artifact-v1":
            raise ValueError("unrecognized artifact format")
        nodes: dict[str, ShortcutNode] = {}
        for rec in data["nodes"]:
            nodes[rec["id"]] = ShortcutNode(
                id=rec["id"],
                template=parse(rec["template"]),
                stats={scope: SplitStats.from_json(ss) for scope, ss in rec["stats"].items()},
                parent_ids=list(rec["parent_ids"]),
                child_ids=list(rec["child_ids"]),
                selected=rec["selected"],
                aggregated=rec["aggregated"],
                covered_ids=set(rec["covered_ids"]),
            )
        return cls(
            dataset_name=data["dataset_name"],
            dataset_fingerprint=data["dataset_fingerprint"],
            config=MiningConfig.from_json(data["config"]),
            nodes=nodes,
            root_ids=list(data["root_ids"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True, indent=1) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> MinedArtifact:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
