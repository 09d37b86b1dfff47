"""Loading, validation, and indexing of pre-annotated datasets.

Input files are line-delimited JSON (one instance per line) with token/POS
annotation already attached; this package deliberately ships no tagger, so
POS tags are opaque strings from whatever tagset the annotator used.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Raised for malformed dataset, prediction, or embedding files."""


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str

    def __post_init__(self) -> None:
        if not self.surface:
            raise CorpusError("token surface must be non-empty")
        if not self.pos:
            raise CorpusError("token POS must be non-empty")


@dataclass(frozen=True)
class AnnotatedInstance:
    id: str
    text: str
    tokens: tuple[Token, ...]
    label: str
    split: str

    def __post_init__(self) -> None:
        if not self.tokens:
            raise CorpusError(f"instance {self.id!r} has an empty token list")


@dataclass(frozen=True)
class ModelPredictions:
    model_name: str
    predicted: dict[str, str]

    def covers(self, instance_ids: set[str]) -> bool:
        return instance_ids <= self.predicted.keys()


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: dict[str, tuple[float, ...]]

    def get(self, word: str) -> tuple[float, ...] | None:
        return self.vectors.get(word)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class Dataset:
    name: str
    instances: list[AnnotatedInstance]
    labels: list[str]
    splits: list[str]
    models: list[ModelPredictions] = field(default_factory=list)
    embeddings: EmbeddingTable | None = None

    def __post_init__(self) -> None:
        self._by_id = {inst.id: inst for inst in self.instances}
        if len(self._by_id) != len(self.instances):
            raise CorpusError("duplicate instance ids")

    def __len__(self) -> int:
        return len(self.instances)

    def get(self, instance_id: str) -> AnnotatedInstance:
        return self._by_id[instance_id]

    def has(self, instance_id: str) -> bool:
        return instance_id in self._by_id

    def split_ids(self, split: str | None = None) -> list[str]:
        """Instance ids in a split, or all ids when split is None."""
        if split is None:
            return [inst.id for inst in self.instances]
        if split not in self.splits:
            raise CorpusError(f"unknown split {split!r}")
        return [inst.id for inst in self.instances if inst.split == split]

    def model(self, model_name: str) -> ModelPredictions:
        for mp in self.models:
            if mp.model_name == model_name:
                return mp
        raise CorpusError(f"unknown model {model_name!r}")

    @property
    def fingerprint(self) -> str:
        """Content hash of the canonical serialization (stable across cosmetic rewrites)."""
        h = hashlib.sha256()
        for line in serialize_instances(self.instances):
            h.update(line.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


def _ordered_unique(values: list[str]) -> list[str]:
    seen: dict[str, None] = {}
    for v in values:
        seen.setdefault(v)
    return list(seen)


def _parse_instance(record: dict, lineno: int) -> AnnotatedInstance:
    known = {"id", "text", "tokens", "label", "split"}
    for key in ("id", "text", "tokens", "label", "split"):
        if key not in record:
            raise CorpusError(f"line {lineno}: missing field {key!r}")
    extra = set(record) - known
    if extra:
        log.warning("line %d: ignoring unknown fields %s", lineno, sorted(extra))
    raw_tokens = record["tokens"]
    if not isinstance(raw_tokens, list):
        raise CorpusError(f"line {lineno}: 'tokens' must be an array")
    try:
        tokens = tuple(Token(surface=t["t"], pos=t["pos"]) for t in raw_tokens)
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"line {lineno}: malformed token entry ({exc})") from exc
    try:
        return AnnotatedInstance(
            id=str(record["id"]),
            text=str(record["text"]),
            tokens=tokens,
            label=str(record["label"]),
            split=str(record["split"]),
        )
    except CorpusError as exc:
        raise CorpusError(f"line {lineno}: {exc}") from exc


def load_dataset(path: str | Path, name: str | None = None) -> Dataset:
    """Load and validate a line-delimited dataset file.

    Raises CorpusError with the offending line number for malformed records,
    duplicate ids, or empty token lists. Unknown fields only warn.
    """
    path = Path(path)
    instances: list[AnnotatedInstance] = []
    seen_ids: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            inst = _parse_instance(record, lineno)
            if inst.id in seen_ids:
                raise CorpusError(f"line {lineno}: duplicate instance id {inst.id!r}")
            seen_ids.add(inst.id)
            instances.append(inst)
    return dataset_from_instances(name or path.stem, instances)


def dataset_from_instances(name: str, instances: list[AnnotatedInstance]) -> Dataset:
    """Build a Dataset with label/split sets in first-appearance order."""
    labels = _ordered_unique([i.label for i in instances])
    splits = _ordered_unique([i.split for i in instances])
    return Dataset(name=name, instances=list(instances), labels=labels, splits=splits)


def serialize_instances(instances: list[AnnotatedInstance]) -> list[str]:
    lines = []
    for inst in instances:
        record = {
            "id": inst.id,
            "text": inst.text,
            "tokens": [{"t": t.surface, "pos": t.pos} for t in inst.tokens],
            "label": inst.label,
            "split": inst.split,
        }
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    return lines


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for line in serialize_instances(dataset.instances):
            fh.write(line + "\n")


def load_predictions(path: str | Path, dataset: Dataset) -> list[ModelPredictions]:
    """Load model prediction records and attach them to the dataset.

    Every predicted instance id must exist and every predicted label must be
    in the dataset's label set.
    """
    path = Path(path)
    models: list[ModelPredictions] = []
    label_set = set(dataset.labels)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if "model" not in record or "predictions" not in record:
                raise CorpusError(f"line {lineno}: expected fields 'model' and 'predictions'")
            preds: dict[str, str] = {}
            for iid, plabel in record["predictions"].items():
                if not dataset.has(iid):
                    raise CorpusError(f"line {lineno}: prediction for unknown instance id {iid!r}")
                if plabel not in label_set:
                    raise CorpusError(
                        f"line {lineno}: predicted label {plabel!r} outside dataset label set"
                    )
                preds[iid] = plabel
            models.append(ModelPredictions(model_name=str(record["model"]), predicted=preds))
    dataset.models = models
    return models


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load a word-embedding table (word<TAB>v1 v2 ... vd per line).

    Dimensionality must be constant; duplicate words warn and keep the last
    occurrence; all-zero vectors are rejected (cosine undefined).
    """
    path = Path(path)
    vectors: dict[str, tuple[float, ...]] = {}
    dim: int | None = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            word, _, rest = line.partition("\t")
            if not rest:
                raise CorpusError(f"line {lineno}: expected word<TAB>values")
            try:
                vec = tuple(float(x) for x in rest.split())
            except ValueError as exc:
                raise CorpusError(f"line {lineno}: non-numeric vector component") from exc
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise CorpusError(
                    f"line {lineno}: dimension {len(vec)} differs from established {dim}"
                )
            if all(x == 0.0 for x in vec):
                raise CorpusError(f"line {lineno}: zero vector for word {word!r}")
            if word in vectors:
                log.warning("line %d: duplicate word %r, keeping last occurrence", lineno, word)
            vectors[word] = vec
    if dim is None:
        raise CorpusError("empty embedding file")
    return EmbeddingTable(dim=dim, vectors=vectors)


def accuracy(dataset: Dataset, model: ModelPredictions, instance_ids: list[str]) -> float | None:
    """Fraction of the given instances the model predicts correctly.

    None when the id list is empty or the model does not cover it totally.
    """
    if not instance_ids:
        return None
    correct = 0
    for iid in instance_ids:
        pred = model.predicted.get(iid)
        if pred is None:
            return None
        if pred == dataset.get(iid).label:
            correct += 1
    return correct / len(instance_ids)


def dataset_stats(dataset: Dataset, split: str | None = None) -> dict:
    """Instance counts, label distribution, and per-model accuracy.

    With split=None the totals cover the whole dataset. Model accuracies are
    reported only for models whose predictions totally cover the scope.
    """
    ids = dataset.split_ids(split)
    counts: dict[str, int] = {label: 0 for label in dataset.labels}
    for iid in ids:
        counts[dataset.get(iid).label] += 1
    total = len(ids)
    fractions = {label: (c / total if total else 0.0) for label, c in counts.items()}
    if total:
        assert math.isclose(sum(fractions.values()), 1.0, abs_tol=1e-9)
    model_accuracy = {}
    for mp in dataset.models:
        acc = accuracy(dataset, mp, ids)
        if acc is not None:
            model_accuracy[mp.model_name] = acc
    per_split_counts = {s: len(dataset.split_ids(s)) for s in dataset.splits}
    return {
        "split": split,
        "count": total,
        "per_split_counts": per_split_counts,
        "label_counts": counts,
        "label_fractions": fractions,
        "model_accuracy": model_accuracy,
    }
