"""Seeded random corpus generation for property and oracle tests."""

from __future__ import annotations

import random

from shortcutaudit.corpus import AnnotatedInstance, Dataset, ModelPredictions, Token, dataset_from_instances

POS_POOL = ["NOUN", "VERB", "ADP", "DET", "PRON", "ADV"]
WORDS_BY_POS = {
    "NOUN": ["men", "train", "temple", "book", "side"],
    "VERB": ["will", "leave", "walk", "sign"],
    "ADP": ["in", "on", "under", "up"],
    "DET": ["The", "a", "that"],
    "PRON": ["he", "she", "it"],
    "ADV": ["all", "mostly"],
}


def random_instances(
    rng: random.Random,
    n_instances: int,
    max_tokens: int = 12,
    min_tokens: int = 3,
    labels: tuple[str, ...] = ("true", "false"),
    splits: tuple[str, ...] = ("train", "test"),
    n_pos: int = 4,
    words_per_pos: int = 3,
) -> list[AnnotatedInstance]:
    pos_pool = POS_POOL[:n_pos]
    instances = []
    for k in range(n_instances):
        n_tok = rng.randint(min_tokens, max_tokens)
        tokens = []
        for _ in range(n_tok):
            pos = rng.choice(pos_pool)
            word = rng.choice(WORDS_BY_POS[pos][:words_per_pos])
            tokens.append(Token(surface=word, pos=pos))
        instances.append(
            AnnotatedInstance(
                id=f"i{k:03d}",
                text=" ".join(t.surface for t in tokens),
                tokens=tuple(tokens),
                label=rng.choice(labels),
                split=rng.choice(splits),
            )
        )
    return instances


def random_dataset(rng: random.Random, n_instances: int, name: str = "random", **kw) -> Dataset:
    return dataset_from_instances(name, random_instances(rng, n_instances, **kw))


def attach_random_models(rng: random.Random, dataset: Dataset, n_models: int = 2) -> None:
    """Full-coverage models that are right with per-model probability."""
    models = []
    for m in range(n_models):
        p_correct = rng.uniform(0.4, 0.95)
        predicted = {}
        for inst in dataset.instances:
            if rng.random() < p_correct:
                predicted[inst.id] = inst.label
            else:
                predicted[inst.id] = rng.choice([lb for lb in dataset.labels if lb != inst.label] or [inst.label])
        models.append(ModelPredictions(model_name=f"m{m}", predicted=predicted))
    dataset.models = models


def to_reference_shape(instances) -> list[dict]:
    return [
        {
            "id": inst.id,
            "tokens": [(t.pos, t.surface) for t in inst.tokens],
            "label": inst.label,
            "split": inst.split,
        }
        for inst in instances
    ]
