"""Shortcut auditing engine for NLU classification datasets.

Mines matching-based shortcut templates (word/POS slots with an exact gap),
quantifies their coverage and productivity, organizes them into an
abstraction hierarchy, merges semantically similar siblings, and supports
what-if removal analysis — as a library, a CLI, and an HTTP service.
"""

from .aggregation import aggregate_artifact, build_artifact
from .corpus import (
    AnnotatedInstance,
    CorpusError,
    Dataset,
    EmbeddingTable,
    ModelPredictions,
    Token,
    dataset_stats,
    load_dataset,
    load_embeddings,
    load_predictions,
    save_dataset,
)
from .mining import MinedArtifact, MiningConfig, ShortcutNode, SplitStats, mine
from .projection import ProjectionPoint, project
from .templates import MatchSpan, Slot, Template, canonical, match_spans, matches, parents
from .whatif import GroupSelection, WhatIfReport, remove_and_remine, whatif_report

__version__ = "0.1.0"

__all__ = [
    "AnnotatedInstance",
    "CorpusError",
    "Dataset",
    "EmbeddingTable",
    "GroupSelection",
    "MatchSpan",
    "MinedArtifact",
    "MiningConfig",
    "ModelPredictions",
    "ProjectionPoint",
    "ShortcutNode",
    "Slot",
    "SplitStats",
    "Template",
    "Token",
    "WhatIfReport",
    "aggregate_artifact",
    "build_artifact",
    "canonical",
    "dataset_stats",
    "load_dataset",
    "load_embeddings",
    "load_predictions",
    "match_spans",
    "matches",
    "mine",
    "parents",
    "project",
    "remove_and_remine",
    "save_dataset",
    "whatif_report",
]
