"""What-if analysis over a selected group of shortcuts: dirty/clean
partitioning, group productivity with disagreed-instance accounting, machine
accuracy comparisons, and removal + re-mine.

Degenerate quotients (empty dirty set, zero agreed instances, models without
full coverage) are reported as None, never as 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .corpus import Dataset, ModelPredictions, accuracy, dataset_from_instances
from .mining import MinedArtifact, MiningConfig
from .templates import canonical

log = logging.getLogger(__name__)


class SelectionError(KeyError):
    """Unknown shortcut node id or unknown split in a selection."""


@dataclass(frozen=True)
class GroupSelection:
    shortcut_ids: tuple[str, ...]
    split: str | None = None

    @classmethod
    def of(cls, shortcut_ids, split=None) -> GroupSelection:
        return cls(shortcut_ids=tuple(shortcut_ids), split=split)


@dataclass
class AccuracySet:
    whole: float | None
    dirty: float | None
    clean: float | None

    @property
    def delta_dirty(self) -> float | None:
        if self.whole is None or self.dirty is None:
            return None
        return self.dirty - self.whole

    @property
    def delta_clean(self) -> float | None:
        if self.whole is None or self.clean is None:
            return None
        return self.clean - self.whole

    def to_json(self) -> dict:
        return {
            "whole": self.whole,
            "dirty": self.dirty,
            "clean": self.clean,
            "delta_dirty": self.delta_dirty,
            "delta_clean": self.delta_clean,
        }


@dataclass
class WhatIfReport:
    selection: GroupSelection
    split_size: int
    dirty_ids: list[str]
    clean_ids: list[str]
    group_coverage: int
    disagreed_count: int
    group_productivity: float | None
    model_accuracy: dict[str, AccuracySet] = field(default_factory=dict)
    average_accuracy: AccuracySet | None = None

    def to_json(self) -> dict:
        return {
            "selection": {
                "shortcut_ids": sorted(self.selection.shortcut_ids),
                "split": self.selection.split,
            },
            "split_size": self.split_size,
            "dirty_ids": sorted(self.dirty_ids),
            "clean_ids": sorted(self.clean_ids),
            "group_coverage": self.group_coverage,
            "disagreed_count": self.disagreed_count,
            "group_productivity": self.group_productivity,
            "accuracy": {
                "models": {m: a.to_json() for m, a in sorted(self.model_accuracy.items())},
                "average": self.average_accuracy.to_json() if self.average_accuracy else None,
            },
        }


def _check_selection(selection: GroupSelection, artifact: MinedArtifact, dataset: Dataset) -> None:
    for sid in selection.shortcut_ids:
        if sid not in artifact.nodes:
            raise SelectionError(f"unknown shortcut id {sid!r}")
    if selection.split is not None and selection.split not in dataset.splits:
        raise SelectionError(f"unknown split {selection.split!r}")


def partition(
    selection: GroupSelection, artifact: MinedArtifact, dataset: Dataset
) -> tuple[set[str], set[str]]:
    """Dirty = union of the selected nodes' covered instances within the
    split; clean = the split's complement."""
    _check_selection(selection, artifact, dataset)
    scope = set(dataset.split_ids(selection.split))
    dirty: set[str] = set()
    for sid in selection.shortcut_ids:
        dirty |= artifact.nodes[sid].covered_ids & scope
    return dirty, scope - dirty


def _node_prediction(node, split: str | None) -> str | None:
    scope = "whole" if split is None else split
    return node.stats[scope].prediction_label


def group_productivity(
    selection: GroupSelection, artifact: MinedArtifact, dataset: Dataset
) -> tuple[float | None, int, int]:
    """(productivity, disagreed_count, coverage) for the selected group.

    An instance covered by selected shortcuts with conflicting prediction
    labels is disagreed and drops out of both the numerator and denominator;
    productivity is None (undefined) when no agreed instances remain.
    """
    dirty, _ = partition(selection, artifact, dataset)
    nodes = [artifact.nodes[sid] for sid in selection.shortcut_ids]
    disagreed = 0
    agreed = 0
    agreed_correct = 0
    for iid in dirty:
        labels = {
            _node_prediction(n, selection.split) for n in nodes if iid in n.covered_ids
        }
        labels.discard(None)
        if len(labels) > 1:
            disagreed += 1
            continue
        agreed += 1
        if dataset.get(iid).label in labels:
            agreed_correct += 1
    productivity = agreed_correct / agreed if agreed else None
    return productivity, disagreed, len(dirty)


def accuracy_deltas(
    selection: GroupSelection,
    artifact: MinedArtifact,
    dataset: Dataset,
    dirty: set[str] | None = None,
    clean: set[str] | None = None,
) -> tuple[dict[str, AccuracySet], AccuracySet | None]:
    """Per-model and averaged accuracy on whole/dirty/clean; models without
    total coverage of the split are omitted with a warning."""
    if dirty is None or clean is None:
        dirty, clean = partition(selection, artifact, dataset)
    whole_ids = sorted(dirty | clean)
    dirty_ids = sorted(dirty)
    clean_ids = sorted(clean)
    per_model: dict[str, AccuracySet] = {}
    for mp in dataset.models:
        whole_acc = accuracy(dataset, mp, whole_ids)
        if whole_acc is None and whole_ids:
            log.warning("model %s lacks full coverage of the split; omitted", mp.model_name)
            continue
        per_model[mp.model_name] = AccuracySet(
            whole=whole_acc,
            dirty=accuracy(dataset, mp, dirty_ids),
            clean=accuracy(dataset, mp, clean_ids),
        )
    average = None
    if per_model:
        average = AccuracySet(
            whole=_mean([a.whole for a in per_model.values()]),
            dirty=_mean([a.dirty for a in per_model.values()]),
            clean=_mean([a.clean for a in per_model.values()]),
        )
    return per_model, average


def _mean(values: list[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    if not present or len(present) != len(values):
        return None
    return sum(present) / len(present)


def whatif_report(
    selection: GroupSelection, artifact: MinedArtifact, dataset: Dataset
) -> WhatIfReport:
    dirty, clean = partition(selection, artifact, dataset)
    productivity, disagreed, coverage = group_productivity(selection, artifact, dataset)
    per_model, average = accuracy_deltas(selection, artifact, dataset, dirty, clean)
    return WhatIfReport(
        selection=selection,
        split_size=len(dirty) + len(clean),
        dirty_ids=sorted(dirty),
        clean_ids=sorted(clean),
        group_coverage=coverage,
        disagreed_count=disagreed,
        group_productivity=productivity,
        model_accuracy=per_model,
        average_accuracy=average,
    )


def remove_instances(
    selection: GroupSelection, artifact: MinedArtifact, dataset: Dataset, name: str | None = None
) -> tuple[Dataset, set[str]]:
    """Derived dataset without the selection's covered instances.

    With a split on the selection only that split's covered instances go;
    with split=None every covered instance goes. Predictions are carried
    over restricted to the surviving instances.
    """
    dirty, _ = partition(selection, artifact, dataset)
    remaining = [inst for inst in dataset.instances if inst.id not in dirty]
    new_dataset = dataset_from_instances(name or f"{dataset.name}-removal", remaining)
    emptied = set(dataset.splits) - set(new_dataset.splits)
    if emptied:
        log.warning("removal emptied split(s): %s", sorted(emptied))
    kept = {inst.id for inst in remaining}
    new_dataset.models = [
        ModelPredictions(
            model_name=mp.model_name,
            predicted={iid: lab for iid, lab in mp.predicted.items() if iid in kept},
        )
        for mp in dataset.models
    ]
    new_dataset.embeddings = dataset.embeddings
    return new_dataset, dirty


def remove_and_remine(
    selection: GroupSelection,
    artifact: MinedArtifact,
    dataset: Dataset,
    config: MiningConfig | None = None,
    name: str | None = None,
) -> tuple[Dataset, MinedArtifact, dict]:
    """Derive a dataset without the covered instances, re-mine with the same
    config, and report what disappeared/appeared among selected shortcuts."""
    from .aggregation import build_artifact

    config = config or artifact.config
    new_dataset, removed = remove_instances(selection, artifact, dataset, name)
    new_artifact = build_artifact(new_dataset, config)
    before = {canonical(n.template) for n in artifact.selected_nodes()}
    after = {canonical(n.template) for n in new_artifact.selected_nodes()}
    target_presence = {}
    for sid in selection.shortcut_ids:
        form = canonical(artifact.nodes[sid].template)
        target_presence[form] = "present" if form in after else "absent"
    split_ids_after = (
        new_dataset.split_ids(selection.split)
        if selection.split in (None, *new_dataset.splits)
        else []
    )
    acc_before = _average_accuracy(dataset, dataset.split_ids(selection.split))
    acc_after = _average_accuracy(new_dataset, split_ids_after)
    comparison = {
        "removed_instances": len(removed),
        "selected_before": len(before),
        "selected_after": len(after),
        "selected_delta": len(after) - len(before),
        "disappeared": sorted(before - after),
        "appeared": sorted(after - before),
        "targets": target_presence,
        "split": selection.split,
        "average_accuracy_before": acc_before,
        "average_accuracy_after": acc_after,
    }
    return new_dataset, new_artifact, comparison


def _average_accuracy(dataset: Dataset, instance_ids: list[str]) -> float | None:
    accs = []
    for mp in dataset.models:
        acc = accuracy(dataset, mp, instance_ids)
        if acc is not None:
            accs.append(acc)
    if not accs:
        return None
    return sum(accs) / len(accs)
