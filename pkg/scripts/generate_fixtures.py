#!/usr/bin/env python3
"""Build the mini_space fixture corpus and freeze its golden files.

The corpus is hand-shaped so that at productivity >= 0.75 / coverage >= 5
exactly five shortcuts survive: the noun "zuoshou" class (one template) and
the "pang bian" adposition-noun bigram class (four templates). The selected
list and its statistics are derived with the independent reference miner;
the served payload snapshots are then frozen for byte-for-byte regression.

Run from the repository root:  python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))
sys.path.insert(0, str(ROOT / "src"))

from reference_miner import ref_mine  # noqa: E402

FIXTURES = ROOT / "fixtures"
GOLDEN = FIXTURES / "golden"

# shape legend: Z = zuoshou/NOUN plant, PB = pang+bian bigram plant,
# C = bian without a preceding adposition; lowercase entries are POS codes
# filled with per-instance unique words.
POS = {"n": "NOUN", "v": "VERB", "p": "ADP", "d": "DET", "r": "PRON",
       "m": "NUM", "a": "ADV", "u": "PUNCT"}

PLANT_A = [
    # (shape, label, split); 12 instances, 10 true
    (["r", "v", "Z", "u"], "true", "train"),
    (["d", "Z", "v", "a", "u"], "true", "test"),
    (["Z", "v", "d", "m", "u"], "false", "train"),
    (["r", "a", "v", "Z", "u"], "true", "train"),
    (["m", "Z", "a", "v", "u"], "true", "test"),
    (["Z", "a", "v", "r", "u"], "true", "train"),
    (["d", "v", "Z", "a", "u"], "true", "test"),
    (["r", "Z", "v", "m", "u"], "false", "train"),
    (["Z", "d", "v", "a", "u"], "true", "train"),
    (["a", "v", "Z", "r", "u"], "true", "test"),
    (["Z", "r", "v", "d", "u"], "true", "train"),
    (["m", "Z", "v", "a", "u"], "true", "test"),
]

PLANT_B = [
    (["r", "v", "PB", "u"], "true", "train"),
    (["d", "PB", "v", "u"], "true", "test"),
    (["PB", "v", "r", "u"], "true", "train"),
    (["m", "v", "PB", "a", "u"], "false", "train"),
    (["r", "PB", "v", "u"], "true", "test"),
    (["a", "PB", "v", "m", "u"], "true", "train"),
    (["d", "v", "PB", "u"], "true", "train"),
    (["PB", "a", "v", "u"], "true", "test"),
]

PLANT_C = [  # 'bian' never directly preceded by an adposition
    (["C", "v", "r", "u"], "false", "test"),
    (["r", "v", "C", "u"], "true", "train"),
    (["d", "C", "a", "v", "u"], "false", "test"),
    (["C", "a", "v", "u"], "false", "train"),
    (["m", "v", "C", "u"], "true", "train"),
    (["r", "C", "v", "u"], "false", "train"),
]

FILLER = [
    # four adposition+noun bigrams with unique words dilute (ADP gap=0 NOUN)
    (["r", "v", "pn", "u"], "false", "train"),
    (["pn", "v", "a", "u"], "false", "test"),
    (["d", "v", "pn", "u"], "false", "train"),
    (["m", "pn", "v", "u"], "false", "train"),
    # plain unique-word filler
    (["r", "v", "n", "u"], "false", "train"),
    (["d", "n", "v", "a", "u"], "true", "test"),
    (["n", "v", "m", "u"], "true", "train"),
    (["r", "a", "v", "n", "u"], "false", "test"),
    (["v", "n", "a", "u"], "true", "train"),
    (["d", "v", "n", "m", "u"], "false", "train"),
    (["n", "a", "v", "u"], "false", "test"),
    (["r", "n", "v", "u"], "true", "train"),
    (["a", "v", "n", "d", "u"], "false", "train"),
    (["n", "v", "r", "u"], "false", "test"),
    (["m", "v", "n", "a", "u"], "false", "train"),
    (["v", "a", "n", "u"], "true", "train"),
    (["d", "a", "v", "n", "u"], "true", "test"),
    (["n", "m", "v", "u"], "false", "train"),
    (["r", "v", "a", "n", "u"], "false", "train"),
    (["a", "n", "v", "u"], "false", "test"),
    (["v", "n", "d", "u"], "false", "train"),
    (["n", "d", "v", "a", "u"], "false", "train"),
    (["m", "a", "v", "n", "u"], "true", "train"),
    (["v", "r", "n", "a", "u"], "false", "test"),
]

PINYIN = [
    "shan", "shui", "lu", "qiao", "men", "chuang", "shu", "cao", "tian", "hai",
    "feng", "yun", "xue", "yu", "hu", "gu", "lin", "tang", "jie", "cheng",
    "zhen", "cun", "fang", "ting", "yuan", "tai", "ge", "lou", "dao", "an",
]
ENGLISH = [
    "hill", "river", "road", "bridge", "door", "window", "tree", "grass",
    "field", "sea", "wind", "cloud", "snow", "rain", "lake", "valley",
    "wood", "hall", "street", "town", "village", "yard", "room", "court",
    "stage", "tower", "path", "bank", "gate", "wall",
]


def build_instances():
    counter = {"w": 0}

    def unique_word(idx):
        k = counter["w"]
        counter["w"] += 1
        # alternating pinyin-like and English-like surface forms
        pool = PINYIN if k % 2 == 0 else ENGLISH
        return f"{pool[k % len(pool)]}{k:02d}"

    instances = []

    def emit(prefix, rows):
        for i, (shape, label, split) in enumerate(rows):
            tokens = []
            for code in shape:
                if code == "Z":
                    tokens.append(("zuoshou", "NOUN"))
                elif code == "PB":
                    tokens.append(("pang", "ADP"))
                    tokens.append(("bian", "NOUN"))
                elif code == "C":
                    tokens.append(("bian", "NOUN"))
                elif code == "pn":
                    tokens.append((unique_word(i), "ADP"))
                    tokens.append((unique_word(i), "NOUN"))
                elif code == "u":
                    tokens.append((".", "PUNCT"))
                else:
                    tokens.append((unique_word(i), POS[code]))
            instances.append(
                {
                    "id": f"ms{prefix}{i:02d}",
                    "text": " ".join(t for t, _ in tokens),
                    "tokens": [{"t": t, "pos": p} for t, p in tokens],
                    "label": label,
                    "split": split,
                }
            )

    emit("A", PLANT_A)
    emit("B", PLANT_B)
    emit("C", PLANT_C)
    emit("F", FILLER)
    return instances


EXPECTED_SELECTED = {
    "[pos=NOUN word=zuoshou]",
    "[pos=ADP word=pang]",
    "[pos=ADP word=pang] gap=0 [pos=NOUN]",
    "[pos=ADP] gap=0 [pos=NOUN word=bian]",
    "[pos=ADP word=pang] gap=0 [pos=NOUN word=bian]",
}

MIN_COVERAGE = 5
MIN_PRODUCTIVITY = 0.75


def build_predictions(instances):
    rng = random.Random(20220814)
    labels = ["true", "false"]
    models = []
    for name, p_correct in [("m_strong", 0.85), ("m_mid", 0.7), ("m_weak", 0.55)]:
        predictions = {}
        for inst in instances:
            if rng.random() < p_correct:
                predictions[inst["id"]] = inst["label"]
            else:
                predictions[inst["id"]] = next(l for l in labels if l != inst["label"])
        models.append({"model": name, "predictions": predictions})
    return models


def build_embeddings(instances):
    rng = random.Random(99)
    words = sorted({tok["t"] for inst in instances for tok in inst["tokens"]})
    lines = []
    for word in words:
        vec = [round(rng.uniform(-1, 1), 4) for _ in range(8)]
        if all(v == 0 for v in vec):
            vec[0] = 0.1
        lines.append(word + "\t" + " ".join(str(v) for v in vec))
    return "\n".join(lines) + "\n"


def canonical_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n"


def main() -> int:
    instances = build_instances()
    assert len(instances) == 50, len(instances)

    ref_shape = [
        {
            "id": inst["id"],
            "tokens": [(tok["pos"], tok["t"]) for tok in inst["tokens"]],
            "label": inst["label"],
            "split": inst["split"],
        }
        for inst in instances
    ]
    ref = ref_mine(
        ref_shape,
        min_coverage=MIN_COVERAGE,
        min_productivity=MIN_PRODUCTIVITY,
        max_gap=None,
        floor=2,
    )
    if ref["selected"] != EXPECTED_SELECTED:
        print("reference selected set mismatch:")
        for extra in sorted(ref["selected"] - EXPECTED_SELECTED):
            print(f"  unexpected: {extra}  {ref['stats'][extra]['whole']}")
        for missing in sorted(EXPECTED_SELECTED - ref["selected"]):
            got = ref["stats"].get(missing, {}).get("whole")
            print(f"  missing:    {missing}  {got}")
        return 1

    FIXTURES.mkdir(exist_ok=True)
    GOLDEN.mkdir(exist_ok=True)
    with (FIXTURES / "mini_space.jsonl").open("w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst, ensure_ascii=False) + "\n")
    models = build_predictions(instances)
    with (FIXTURES / "mini_space.predictions.jsonl").open("w", encoding="utf-8") as fh:
        for model in models:
            fh.write(json.dumps(model, ensure_ascii=False, sort_keys=True) + "\n")
    (FIXTURES / "mini_space.embeddings.tsv").write_text(
        build_embeddings(instances), encoding="utf-8"
    )

    # golden 1: the reference-derived selected list with full statistics
    selected_golden = []
    for form in sorted(ref["selected"]):
        selected_golden.append(
            {
                "template": form,
                "stats": ref["stats"][form],
                "covered_ids": sorted(ref["covered"][form]),
            }
        )
    (GOLDEN / "mini_space_selected.json").write_text(
        canonical_json(selected_golden), encoding="utf-8"
    )

    # golden 2: independently computed what-if expectations for the scripted
    # two-shortcut selection (set algebra over reference covered sets)
    target_a = "[pos=NOUN word=zuoshou]"
    target_b = "[pos=ADP word=pang] gap=0 [pos=NOUN word=bian]"
    split = "test"
    split_ids = {inst["id"] for inst in instances if inst["split"] == split}
    by_id = {inst["id"]: inst for inst in instances}
    cov_a = ref["covered"][target_a] & split_ids
    cov_b = ref["covered"][target_b] & split_ids
    dirty = cov_a | cov_b
    clean = split_ids - dirty
    pred_a = ref["stats"][target_a][split]["prediction_label"]
    pred_b = ref["stats"][target_b][split]["prediction_label"]
    disagreed = {
        iid
        for iid in cov_a & cov_b
        if pred_a != pred_b
    }
    agreed = dirty - disagreed
    correct = sum(
        1
        for iid in agreed
        if by_id[iid]["label"] == (pred_a if iid in cov_a else pred_b)
    )
    model_acc = {}
    for model in models:
        preds = model["predictions"]

        def acc(ids):
            if not ids:
                return None
            return sum(1 for i in ids if preds[i] == by_id[i]["label"]) / len(ids)

        model_acc[model["model"]] = {
            "whole": acc(split_ids),
            "dirty": acc(dirty),
            "clean": acc(clean),
        }
    whatif_expected = {
        "selection_templates": [target_a, target_b],
        "split": split,
        "dirty_ids": sorted(dirty),
        "clean_ids": sorted(clean),
        "group_coverage": len(dirty),
        "disagreed_count": len(disagreed),
        "group_productivity": (correct / len(agreed)) if agreed else None,
        "model_accuracy": model_acc,
    }
    (GOLDEN / "mini_space_whatif_expected.json").write_text(
        canonical_json(whatif_expected), encoding="utf-8"
    )

    # golden 3-5: byte snapshots of the served payloads
    from fastapi.testclient import TestClient

    from shortcutaudit.mining import MiningConfig
    from shortcutaudit.server import create_app
    from shortcutaudit.templates import parse, template_id

    app = create_app(
        FIXTURES,
        MiningConfig(min_coverage_whole=5, min_productivity_whole=0.5),
        cache_dir=FIXTURES / ".cache-gen",
    )
    client = TestClient(app)
    query = f"min_coverage={MIN_COVERAGE}&min_productivity={MIN_PRODUCTIVITY}"
    shortcuts = client.get(f"/datasets/mini_space/shortcuts?{query}").json()
    assert shortcuts["count"] == 5, shortcuts["count"]
    (GOLDEN / "mini_space_shortcuts.json").write_text(
        canonical_json(shortcuts), encoding="utf-8"
    )
    projection = client.get(f"/datasets/mini_space/projection?{query}").json()
    assert len(projection["points"]) == 5
    (GOLDEN / "mini_space_projection.json").write_text(
        canonical_json(projection), encoding="utf-8"
    )
    ids = [template_id(parse(target_a)), template_id(parse(target_b))]
    whatif = client.post(
        "/datasets/mini_space/whatif", json={"shortcut_ids": ids, "split": split}
    ).json()
    (GOLDEN / "mini_space_whatif.json").write_text(canonical_json(whatif), encoding="utf-8")

    sid_a = template_id(parse(target_a))
    for style in ("full", "neighbor"):
        rows = client.get(
            f"/datasets/mini_space/shortcuts/{sid_a}/instances?style={style}&page_size=100"
        ).json()
        (GOLDEN / f"mini_space_instances_{style}.json").write_text(
            canonical_json(rows), encoding="utf-8"
        )
    datasets = client.get("/datasets").json()
    (GOLDEN / "mini_space_datasets.json").write_text(canonical_json(datasets), encoding="utf-8")
    detail_sid = template_id(parse("[pos=ADP word=pang] gap=0 [pos=NOUN]"))
    detail = client.get(f"/datasets/mini_space/shortcuts/{detail_sid}").json()
    (GOLDEN / "mini_space_detail.json").write_text(canonical_json(detail), encoding="utf-8")

    import shutil

    shutil.rmtree(FIXTURES / ".cache-gen", ignore_errors=True)
    print("fixtures written:", FIXTURES)
    print("selected:", *sorted(ref["selected"]), sep="\n  ")
    return 0


if __name__ == "__main__":
    sys.exit(main())
