from __future__ import annotations

import csv
import json

import pytest

from shortcutaudit.cli import main
from shortcutaudit.mining import MinedArtifact
from shortcutaudit.templates import parse, template_id

TARGET_A = "[pos=NOUN word=zuoshou]"
TARGET_B = "[pos=ADP word=pang] gap=0 [pos=NOUN word=bian]"


@pytest.fixture
def mined(fixtures_dir, tmp_path):
    artifact_path = tmp_path / "mini.artifact.json"
    code = main(
        [
            "mine",
            "--dataset",
            str(fixtures_dir / "mini_space.jsonl"),
            "--out",
            str(artifact_path),
            "--min-coverage",
            "5",
            "--min-productivity",
            "0.75",
        ]
    )
    assert code == 0
    return artifact_path


class TestMine:
    def test_golden_selected_count(self, mined, capsys):
        artifact = MinedArtifact.load(mined)
        assert len(artifact.selected_nodes()) == 5

    def test_summary_printed(self, fixtures_dir, tmp_path, capsys):
        main(
            [
                "mine",
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--out",
                str(tmp_path / "a.json"),
                "--min-coverage",
                "5",
                "--min-productivity",
                "0.75",
            ]
        )
        out = capsys.readouterr().out
        assert "5 shortcuts selected" in out

    def test_missing_dataset_flag_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["mine", "--out", "x.json"])
        assert err.value.code == 2

    def test_bad_threshold_exit_2(self, fixtures_dir, tmp_path):
        code = main(
            [
                "mine",
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--out",
                str(tmp_path / "a.json"),
                "--min-productivity",
                "1.5",
            ]
        )
        assert code == 2

    def test_rerun_byte_identical(self, fixtures_dir, tmp_path):
        args = [
            "mine",
            "--dataset",
            str(fixtures_dir / "mini_space.jsonl"),
            "--min-coverage",
            "5",
            "--min-productivity",
            "0.75",
        ]
        main(args + ["--out", str(tmp_path / "a.json")])
        main(args + ["--out", str(tmp_path / "b.json")])
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_parse_error_exit_1(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{broken\n", encoding="utf-8")
        code = main(["mine", "--dataset", str(bad), "--out", str(tmp_path / "a.json")])
        assert code == 1


class TestWhatIf:
    def test_json_report(self, fixtures_dir, mined, capsys):
        ids = ",".join([template_id(parse(TARGET_A)), template_id(parse(TARGET_B))])
        code = main(
            [
                "whatif",
                "--artifact",
                str(mined),
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--predictions",
                str(fixtures_dir / "mini_space.predictions.jsonl"),
                "--ids",
                ids,
                "--split",
                "test",
                "--format",
                "json",
            ]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        expected = json.loads(
            (fixtures_dir / "golden" / "mini_space_whatif_expected.json").read_text("utf-8")
        )
        assert report["group_coverage"] == expected["group_coverage"]
        assert report["dirty_ids"] == expected["dirty_ids"]
        assert report["group_productivity"] == pytest.approx(expected["group_productivity"])

    def test_empty_ids_trivial_report(self, fixtures_dir, mined, capsys):
        code = main(
            [
                "whatif",
                "--artifact",
                str(mined),
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--split",
                "test",
            ]
        )
        assert code == 0
        assert "group coverage (dirty): 0" in capsys.readouterr().out

    def test_unknown_id_exit_3(self, fixtures_dir, mined, capsys):
        code = main(
            [
                "whatif",
                "--artifact",
                str(mined),
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--ids",
                "deadbeefdeadbeef",
                "--split",
                "test",
            ]
        )
        assert code == 3
        assert "deadbeefdeadbeef" in capsys.readouterr().err


class TestRemove:
    def test_target_disappears(self, fixtures_dir, mined, tmp_path, capsys):
        code = main(
            [
                "remove",
                "--artifact",
                str(mined),
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--ids",
                template_id(parse(TARGET_A)),
                "--split",
                "test",
                "--out-dataset",
                str(tmp_path / "derived.jsonl"),
                "--format",
                "json",
            ]
        )
        assert code == 0
        comparison = json.loads(capsys.readouterr().out)
        assert comparison["targets"][TARGET_A] == "absent"
        assert (tmp_path / "derived.jsonl").exists()

    def test_noop_selection_zero_deltas(self, fixtures_dir, mined, tmp_path, capsys):
        code = main(
            [
                "remove",
                "--artifact",
                str(mined),
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--split",
                "test",
                "--out-dataset",
                str(tmp_path / "derived.jsonl"),
                "--format",
                "json",
            ]
        )
        assert code == 0
        comparison = json.loads(capsys.readouterr().out)
        assert comparison["selected_delta"] == 0
        assert comparison["disappeared"] == [] and comparison["appeared"] == []

    def test_unwritable_output_exit_4(self, fixtures_dir, mined, tmp_path):
        code = main(
            [
                "remove",
                "--artifact",
                str(mined),
                "--dataset",
                str(fixtures_dir / "mini_space.jsonl"),
                "--ids",
                template_id(parse(TARGET_A)),
                "--split",
                "test",
                "--out-dataset",
                str(tmp_path / "missing-dir" / "derived.jsonl"),
            ]
        )
        assert code == 4


class TestExport:
    def test_row_count_matches_selection(self, mined, tmp_path):
        out = tmp_path / "table.csv"
        code = main(["export", "--artifact", str(mined), "--out", str(out)])
        assert code == 0
        with out.open(encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 5
        assert {r["template"] for r in rows} >= {TARGET_A, TARGET_B}

    def test_split_columns_populated(self, mined, tmp_path):
        out = tmp_path / "table.csv"
        main(["export", "--artifact", str(mined), "--out", str(out), "--split", "test"])
        with out.open(encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert all("coverage_test" in r for r in rows)
        target = next(r for r in rows if r["template"] == TARGET_A)
        assert int(target["coverage_test"]) == 5

    def test_missing_artifact_exit_2(self, tmp_path):
        code = main(["export", "--artifact", str(tmp_path / "none.json"), "--out", "-"])
        assert code == 2

    def test_rows_match_server_filtered_listing(self, fixtures_dir, mined, tmp_path):
        from fastapi.testclient import TestClient

        from shortcutaudit.mining import MiningConfig
        from shortcutaudit.server import create_app

        out = tmp_path / "table.csv"
        main(
            [
                "export",
                "--artifact",
                str(mined),
                "--out",
                str(out),
                "--min-coverage",
                "8",
                "--min-productivity",
                "0.8",
            ]
        )
        with out.open(encoding="utf-8") as fh:
            export_ids = [r["id"] for r in csv.DictReader(fh)]
        app = create_app(
            fixtures_dir,
            MiningConfig(min_coverage_whole=5, min_productivity_whole=0.75),
            cache_dir=tmp_path / "cache",
        )
        with TestClient(app) as client:
            listed = client.get(
                "/datasets/mini_space/shortcuts?min_coverage=8&min_productivity=0.8"
            ).json()["shortcuts"]
        assert export_ids == [s["id"] for s in listed]


class TestAggregateCommand:
    def test_aggregate_roundtrip(self, fixtures_dir, tmp_path):
        # the pron corpus from the aggregation tests, on disk
        lines = []
        k = 0
        for word, label in [("he", "true"), ("she", "true")]:
            for _ in range(3):
                lines.append(
                    json.dumps(
                        {
                            "id": f"p{k}",
                            "text": f"up got {word}",
                            "tokens": [
                                {"t": "up", "pos": "ADP"},
                                {"t": "got", "pos": "VERB"},
                                {"t": word, "pos": "PRON"},
                            ],
                            "label": label,
                            "split": "train",
                        }
                    )
                )
                k += 1
        dataset = tmp_path / "pron.jsonl"
        dataset.write_text("\n".join(lines) + "\n", encoding="utf-8")
        embeddings = tmp_path / "pron.embeddings.tsv"
        embeddings.write_text(
            "he\t1 0\nshe\t0.95 0.05\nup\t0.5 0.5\n", encoding="utf-8"
        )
        artifact = tmp_path / "pron.artifact.json"
        assert (
            main(
                [
                    "mine",
                    "--dataset",
                    str(dataset),
                    "--out",
                    str(artifact),
                    "--min-coverage",
                    "2",
                    "--min-productivity",
                    "0.6",
                    "--coverage-floor",
                    "1",
                ]
            )
            == 0
        )
        out = tmp_path / "aggregated.json"
        code = main(
            [
                "aggregate",
                "--artifact",
                str(artifact),
                "--dataset",
                str(dataset),
                "--embeddings",
                str(embeddings),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        merged = MinedArtifact.load(out)
        assert any(n.aggregated for n in merged.nodes.values())
