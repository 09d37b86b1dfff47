"""Read-mostly HTTP service over datasets and mined artifacts.

Datasets are scanned from a data directory at startup (``<name>.jsonl``, with
optional ``<name>.predictions.jsonl`` and ``<name>.embeddings.tsv`` side
files). Artifacts are mined lazily per (dataset fingerprint, config) and
cached on disk; a re-mine publishes a new immutable snapshot, never mutating
a served one. Removal derives a new dataset file with a provenance record.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from . import whatif as whatif_mod
from .aggregation import build_artifact
from .corpus import (
    CorpusError,
    Dataset,
    dataset_stats,
    load_dataset,
    load_embeddings,
    load_predictions,
    save_dataset,
)
from .mining import MinedArtifact, MiningConfig, ShortcutNode
from .projection import MAX_POINTS, ProjectionLimitError, project
from .templates import canonical, display, match_spans
from .whatif import GroupSelection, SelectionError

log = logging.getLogger(__name__)

NEIGHBOR_RADIUS = 3  # tokens kept on each side of a highlighted token
ELLIPSIS = "…"


@dataclass
class DatasetEntry:
    id: str
    dataset: Dataset
    path: Path
    provenance: dict | None = None
    correctness: dict[str, dict[str, bool]] = field(default_factory=dict)

    def precompute_correctness(self) -> None:
        self.correctness = {
            mp.model_name: {
                iid: pred == self.dataset.get(iid).label for iid, pred in mp.predicted.items()
            }
            for mp in self.dataset.models
        }


class ServiceState:
    def __init__(
        self,
        data_dir: str | Path,
        config: MiningConfig,
        cache_dir: str | Path | None = None,
        seed: int = 0,
    ):
        self.data_dir = Path(data_dir)
        self.config = config
        self.cache_dir = Path(cache_dir) if cache_dir else self.data_dir / ".artifact-cache"
        self.seed = seed
        self.entries: dict[str, DatasetEntry] = {}
        self._artifacts: dict[str, MinedArtifact] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.scan()

    def scan(self) -> None:
        """Load every dataset file in the data directory; malformed files are
        excluded with a log entry so the rest still serve."""
        if not self.data_dir.is_dir():
            return
        for path in sorted(self.data_dir.glob("*.jsonl")):
            if path.name.endswith(".predictions.jsonl"):
                continue
            dataset_id = path.stem
            if dataset_id in self.entries:
                continue
            try:
                self._load_entry(dataset_id, path)
            except (CorpusError, OSError) as exc:
                log.warning("skipping dataset file %s: %s", path.name, exc)

    def _load_entry(self, dataset_id: str, path: Path) -> DatasetEntry:
        dataset = load_dataset(path, name=dataset_id)
        pred_path = path.with_name(f"{dataset_id}.predictions.jsonl")
        if pred_path.exists():
            load_predictions(pred_path, dataset)
        emb_path = path.with_name(f"{dataset_id}.embeddings.tsv")
        if emb_path.exists():
            dataset.embeddings = load_embeddings(emb_path)
        prov_path = path.with_name(f"{dataset_id}.provenance.json")
        provenance = None
        if prov_path.exists():
            provenance = json.loads(prov_path.read_text(encoding="utf-8"))
            emb_ref = provenance.get("embeddings_path")
            if dataset.embeddings is None and emb_ref and Path(emb_ref).exists():
                dataset.embeddings = load_embeddings(emb_ref)
        entry = DatasetEntry(id=dataset_id, dataset=dataset, path=path, provenance=provenance)
        entry.precompute_correctness()
        self.entries[dataset_id] = entry
        return entry

    def entry(self, dataset_id: str) -> DatasetEntry:
        if dataset_id not in self.entries:
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset_id!r}")
        return self.entries[dataset_id]

    def artifact(self, dataset_id: str) -> MinedArtifact:
        """Mined (and, with embeddings, aggregated) artifact; lazy + cached.

        Mining is serialized per dataset; readers always see a complete
        snapshot because publication swaps a single dict slot.
        """
        entry = self.entry(dataset_id)
        fingerprint = entry.dataset.fingerprint
        current = self._artifacts.get(dataset_id)
        if current is not None and current.dataset_fingerprint == fingerprint:
            return current
        with self._lock_for(dataset_id):
            current = self._artifacts.get(dataset_id)
            if current is not None and current.dataset_fingerprint == fingerprint:
                return current
            artifact = self._load_cached(dataset_id, fingerprint)
            if artifact is None:
                artifact = build_artifact(entry.dataset, self.config)
                self._store_cached(dataset_id, fingerprint, artifact)
            self._artifacts[dataset_id] = artifact
            return artifact

    def _lock_for(self, dataset_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(dataset_id, threading.Lock())

    def _cache_path(self, dataset_id: str, fingerprint: str) -> Path:
        return self.cache_dir / f"{dataset_id}.{fingerprint[:12]}.{self.config.hash}.json"

    def _load_cached(self, dataset_id: str, fingerprint: str) -> MinedArtifact | None:
        path = self._cache_path(dataset_id, fingerprint)
        if not path.exists():
            return None
        try:
            artifact = MinedArtifact.load(path)
        except (ValueError, OSError) as exc:
            log.warning("discarding unreadable artifact cache %s: %s", path.name, exc)
            return None
        if artifact.dataset_fingerprint != fingerprint:
            return None
        return artifact

    def _store_cached(self, dataset_id: str, fingerprint: str, artifact: MinedArtifact) -> None:
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            artifact.save(self._cache_path(dataset_id, fingerprint))
        except OSError as exc:
            log.warning("artifact cache write failed: %s", exc)

    def register_removal(
        self, dataset_id: str, selection: GroupSelection
    ) -> tuple[str, dict, bool]:
        """Create (or reuse) a derived dataset for a removal selection.

        Returns (derived id, comparison, created) where created is False when
        the same provenance key had already been materialized.
        """
        entry = self.entry(dataset_id)
        artifact = self.artifact(dataset_id)
        prov_key = hashlib.sha256(
            json.dumps(
                {
                    "parent": entry.dataset.fingerprint,
                    "ids": sorted(selection.shortcut_ids),
                    "split": selection.split,
                    "config": self.config.hash,
                },
                sort_keys=True,
            ).encode("utf-8")
        ).hexdigest()[:10]
        derived_id = f"{dataset_id}+rm-{prov_key}"
        if derived_id in self.entries:
            prov = self.entries[derived_id].provenance or {}
            return derived_id, prov.get("comparison", {}), False
        new_dataset, new_artifact, comparison = whatif_mod.remove_and_remine(
            selection, artifact, entry.dataset, self.config, name=derived_id
        )
        emb_path = entry.path.with_name(f"{dataset_id}.embeddings.tsv")
        provenance = {
            "parent_dataset": dataset_id,
            "parent_fingerprint": entry.dataset.fingerprint,
            "selection": {"shortcut_ids": sorted(selection.shortcut_ids), "split": selection.split},
            "config": self.config.to_json(),
            "comparison": comparison,
            "embeddings_path": str(emb_path) if emb_path.exists() else None,
        }
        try:
            derived_path = self.data_dir / f"{derived_id}.jsonl"
            save_dataset(new_dataset, derived_path)
            if new_dataset.models:
                pred_path = self.data_dir / f"{derived_id}.predictions.jsonl"
                with pred_path.open("w", encoding="utf-8") as fh:
                    for mp in new_dataset.models:
                        fh.write(
                            json.dumps(
                                {"model": mp.model_name, "predictions": mp.predicted},
                                ensure_ascii=False,
                                sort_keys=True,
                            )
                            + "\n"
                        )
            prov_path = self.data_dir / f"{derived_id}.provenance.json"
            prov_path.write_text(
                json.dumps(provenance, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
                encoding="utf-8",
            )
        except OSError as exc:
            raise HTTPException(status_code=507, detail=f"failed to persist derived dataset: {exc}")
        derived_entry = self._load_entry(derived_id, derived_path)
        derived_entry.provenance = provenance
        self._artifacts[derived_id] = new_artifact
        return derived_id, comparison, True


def _node_summary(node: ShortcutNode, splits: list[str] | None = None) -> dict:
    scopes = ["whole"] + (splits if splits else [s for s in node.stats if s != "whole"])
    final = node.template.final_slot
    return {
        "id": node.id,
        "template": canonical(node.template),
        "display": display(node.template),
        "selected": node.selected,
        "aggregated": node.aggregated,
        "word_set": sorted(final.word_set) if final.word_set else None,
        "representative": final.representative,
        "n_slots": len(node.template.slots),
        "gap": node.template.gap,
        "slots": [
            {
                "pos": s.pos,
                "word": s.word,
                "word_set": sorted(s.word_set) if s.word_set else None,
                "representative": s.representative,
            }
            for s in node.template.slots
        ],
        "parent_ids": node.parent_ids,
        "child_ids": node.child_ids,
        "stats": {scope: node.stats[scope].to_json() for scope in scopes if scope in node.stats},
    }


def _filtered_nodes(
    artifact: MinedArtifact,
    min_coverage: int | None,
    min_productivity: float | None,
) -> list[ShortcutNode]:
    nodes = [n for n in artifact.nodes.values() if n.selected or n.aggregated]
    if min_coverage is not None:
        nodes = [n for n in nodes if n.whole.coverage >= min_coverage]
    if min_productivity is not None:
        nodes = [
            n
            for n in nodes
            if n.whole.productivity is not None and n.whole.productivity >= min_productivity
        ]
    nodes.sort(key=lambda n: (-n.whole.coverage, n.id))
    return nodes


def _merge_windows(indices: list[int], n_tokens: int) -> list[tuple[int, int]]:
    """Inclusive windows of +-NEIGHBOR_RADIUS around each index, merged."""
    windows: list[tuple[int, int]] = []
    for i in sorted(indices):
        lo, hi = max(0, i - NEIGHBOR_RADIUS), min(n_tokens - 1, i + NEIGHBOR_RADIUS)
        if windows and lo <= windows[-1][1] + 1:
            windows[-1] = (windows[-1][0], max(windows[-1][1], hi))
        else:
            windows.append((lo, hi))
    return windows


def _instance_row(entry: DatasetEntry, node: ShortcutNode, iid: str, style: str) -> dict:
    inst = entry.dataset.get(iid)
    spans = match_spans(node.template, inst)
    highlighted = sorted({i for span in spans for i in span.indices})
    hl = set(highlighted)
    if style == "neighbor" and highlighted:
        display_tokens = []
        windows = _merge_windows(highlighted, len(inst.tokens))
        if windows[0][0] > 0:
            display_tokens.append({"t": ELLIPSIS, "pos": "", "hl": False, "ellipsis": True})
        for w, (lo, hi) in enumerate(windows):
            if w > 0:
                display_tokens.append({"t": ELLIPSIS, "pos": "", "hl": False, "ellipsis": True})
            for i in range(lo, hi + 1):
                tok = inst.tokens[i]
                display_tokens.append(
                    {"t": tok.surface, "pos": tok.pos, "hl": i in hl, "ellipsis": False}
                )
        if windows[-1][1] < len(inst.tokens) - 1:
            display_tokens.append({"t": ELLIPSIS, "pos": "", "hl": False, "ellipsis": True})
    else:
        display_tokens = [
            {"t": tok.surface, "pos": tok.pos, "hl": i in hl, "ellipsis": False}
            for i, tok in enumerate(inst.tokens)
        ]
    correct = {
        model: table[iid] for model, table in entry.correctness.items() if iid in table
    }
    accuracy = sum(correct.values()) / len(correct) if correct else None
    return {
        "id": iid,
        "split": inst.split,
        "label": inst.label,
        "text": inst.text,
        "spans": [list(span.indices) for span in spans],
        "tokens": display_tokens,
        "correct": correct,
        "accuracy": accuracy,
    }


class WhatIfRequest(BaseModel):
    shortcut_ids: list[str] = []
    split: str | None = None


class RemovalRequest(BaseModel):
    shortcut_ids: list[str] = []
    split: str | None = None


def create_app(
    data_dir: str | Path,
    config: MiningConfig | None = None,
    cache_dir: str | Path | None = None,
    seed: int = 0,
) -> FastAPI:
    config = config or MiningConfig(min_coverage_whole=5, min_productivity_whole=0.5)
    state = ServiceState(data_dir, config, cache_dir=cache_dir, seed=seed)
    app = FastAPI(title="shortcutaudit")
    app.state.service = state

    def _check_split(dataset: Dataset, split: str | None) -> None:
        if split is not None and split not in dataset.splits:
            raise HTTPException(status_code=400, detail=f"unknown split {split!r}")

    @app.get("/datasets")
    def list_datasets() -> list[dict]:
        out = []
        for dataset_id in sorted(state.entries):
            entry = state.entries[dataset_id]
            ds = entry.dataset
            stats = {"whole": dataset_stats(ds)}
            for split in ds.splits:
                stats[split] = dataset_stats(ds, split)
            out.append(
                {
                    "id": dataset_id,
                    "name": ds.name,
                    "counts": {"total": len(ds), "per_split": stats["whole"]["per_split_counts"]},
                    "splits": ds.splits,
                    "labels": ds.labels,
                    "models": [mp.model_name for mp in ds.models],
                    "has_embeddings": ds.embeddings is not None,
                    "stats": stats,
                    "provenance": entry.provenance,
                }
            )
        return out

    @app.get("/datasets/{dataset_id}/shortcuts")
    def list_shortcuts(
        dataset_id: str,
        min_coverage: int | None = Query(default=None),
        min_productivity: float | None = Query(default=None),
        split: str | None = Query(default=None),
    ) -> dict:
        entry = state.entry(dataset_id)
        _check_split(entry.dataset, split)
        artifact = state.artifact(dataset_id)
        nodes = _filtered_nodes(artifact, min_coverage, min_productivity)
        scopes = [split] if split else None
        return {
            "dataset_id": dataset_id,
            "count": len(nodes),
            "shortcuts": [_node_summary(n, scopes) for n in nodes],
        }

    @app.get("/datasets/{dataset_id}/shortcuts/{shortcut_id}")
    def shortcut_detail(dataset_id: str, shortcut_id: str) -> dict:
        artifact = state.artifact(dataset_id)
        if shortcut_id not in artifact.nodes:
            raise HTTPException(status_code=404, detail=f"unknown shortcut {shortcut_id!r}")
        node = artifact.nodes[shortcut_id]
        children = sorted(
            (artifact.nodes[cid] for cid in node.child_ids if cid in artifact.nodes),
            key=lambda c: (-c.whole.coverage, c.id),
        )
        return {
            "node": _node_summary(node),
            "children": [_node_summary(c) for c in children],
        }

    @app.get("/datasets/{dataset_id}/shortcuts/{shortcut_id}/instances")
    def shortcut_instances(
        dataset_id: str,
        shortcut_id: str,
        split: str | None = Query(default=None),
        label: str | None = Query(default=None),
        search: str | None = Query(default=None),
        style: str = Query(default="full"),
        sort: str | None = Query(default=None),
        order: str = Query(default="asc"),
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=1000),
    ) -> dict:
        entry = state.entry(dataset_id)
        _check_split(entry.dataset, split)
        if style not in ("full", "neighbor"):
            raise HTTPException(status_code=400, detail=f"bad style {style!r}")
        if sort not in (None, "accuracy"):
            raise HTTPException(status_code=400, detail=f"bad sort {sort!r}")
        if order not in ("asc", "desc"):
            raise HTTPException(status_code=400, detail=f"bad order {order!r}")
        artifact = state.artifact(dataset_id)
        if shortcut_id not in artifact.nodes:
            raise HTTPException(status_code=404, detail=f"unknown shortcut {shortcut_id!r}")
        node = artifact.nodes[shortcut_id]
        rows = []
        for iid in sorted(node.covered_ids):
            inst = entry.dataset.get(iid)
            if split is not None and inst.split != split:
                continue
            if label is not None and inst.label != label:
                continue
            if search is not None and search not in inst.text:
                continue
            rows.append(_instance_row(entry, node, iid, style))
        if sort == "accuracy":
            rows.sort(
                key=lambda r: (r["accuracy"] is None, r["accuracy"] or 0.0, r["id"]),
                reverse=(order == "desc"),
            )
        total = len(rows)
        start = (page - 1) * page_size
        return {
            "total": total,
            "page": page,
            "page_size": page_size,
            "rows": rows[start : start + page_size],
        }

    @app.post("/datasets/{dataset_id}/whatif")
    def whatif(dataset_id: str, request: WhatIfRequest) -> dict:
        entry = state.entry(dataset_id)
        artifact = state.artifact(dataset_id)
        selection = GroupSelection.of(request.shortcut_ids, request.split)
        try:
            report = whatif_mod.whatif_report(selection, artifact, entry.dataset)
        except SelectionError as exc:
            status = 400 if "split" in str(exc) else 404
            raise HTTPException(status_code=status, detail=str(exc.args[0]))
        return report.to_json()

    @app.get("/datasets/{dataset_id}/projection")
    def projection(
        dataset_id: str,
        min_coverage: int | None = Query(default=None),
        min_productivity: float | None = Query(default=None),
    ) -> dict:
        artifact = state.artifact(dataset_id)
        nodes = _filtered_nodes(artifact, min_coverage, min_productivity)
        nodes.sort(key=lambda n: n.id)
        if len(nodes) > MAX_POINTS:
            raise HTTPException(
                status_code=409,
                detail={"survivors": len(nodes), "limit": MAX_POINTS, "hint": "tighten filters"},
            )
        try:
            points = project(nodes, seed=state.seed)
        except ProjectionLimitError as exc:
            raise HTTPException(
                status_code=409,
                detail={"survivors": exc.count, "limit": MAX_POINTS, "hint": "tighten filters"},
            )
        return {"dataset_id": dataset_id, "points": [p.to_json() for p in points]}

    @app.post("/datasets/{dataset_id}/removal")
    def removal(dataset_id: str, request: RemovalRequest) -> dict:
        entry = state.entry(dataset_id)
        if request.split is not None:
            _check_split(entry.dataset, request.split)
        selection = GroupSelection.of(request.shortcut_ids, request.split)
        try:
            derived_id, comparison, created = state.register_removal(dataset_id, selection)
        except SelectionError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0]))
        return {
            "dataset_id": derived_id,
            "created": created,
            "comparison": comparison,
            "provenance": state.entries[derived_id].provenance,
        }

    return app


def run(
    data_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 8765,
    config: MiningConfig | None = None,
    cache_dir: str | Path | None = None,
    seed: int = 0,
) -> None:
    import uvicorn

    uvicorn.run(create_app(data_dir, config, cache_dir, seed), host=host, port=port)
