"""Batch entry points: mine, aggregate, whatif, remove, export, serve.

Exit codes: 0 ok, 1 data parse error, 2 usage / invalid thresholds,
3 unknown reference (shortcut id), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .aggregation import DEFAULT_CUT, aggregate_artifact
from .corpus import CorpusError, load_dataset, load_embeddings, load_predictions, save_dataset
from .mining import MinedArtifact, MiningConfig, mine
from .whatif import GroupSelection, SelectionError, remove_and_remine, whatif_report

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_USAGE = 2
EXIT_REFERENCE = 3
EXIT_IO = 4


def _add_mining_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-coverage", type=int, default=1)
    parser.add_argument("--min-productivity", type=float, default=0.0)
    parser.add_argument("--max-gap", type=int, default=None)
    parser.add_argument("--coverage-floor", type=int, default=2)
    parser.add_argument("--case-fold", action="store_true")
    parser.add_argument(
        "--split-min",
        action="append",
        default=[],
        metavar="SPLIT=COV,PROD",
        help="per-split minimum coverage and productivity (repeatable)",
    )


def _mining_config(args: argparse.Namespace) -> MiningConfig:
    per_split = {}
    for spec in args.split_min:
        split, _, rest = spec.partition("=")
        cov_str, _, prod_str = rest.partition(",")
        per_split[split] = (int(cov_str), float(prod_str))
    return MiningConfig(
        min_coverage_whole=args.min_coverage,
        min_productivity_whole=args.min_productivity,
        per_split_minima=per_split,
        max_gap=args.max_gap,
        case_fold=args.case_fold,
        coverage_floor=args.coverage_floor,
    )


def _load_inputs(args: argparse.Namespace):
    dataset = load_dataset(args.dataset)
    if getattr(args, "predictions", None):
        load_predictions(args.predictions, dataset)
    if getattr(args, "embeddings", None):
        dataset.embeddings = load_embeddings(args.embeddings)
    return dataset


def _parse_ids(args: argparse.Namespace) -> list[str]:
    ids: list[str] = []
    for chunk in args.ids:
        ids.extend(part for part in chunk.split(",") if part)
    return ids


def cmd_mine(args: argparse.Namespace) -> int:
    config = _mining_config(args)
    dataset = _load_inputs(args)
    artifact = mine(dataset, config)
    artifact.save(args.out)
    selected = artifact.selected_nodes()
    print(
        f"{dataset.name}: {len(selected)} shortcuts selected "
        f"(coverage >= {config.min_coverage_whole}, "
        f"productivity >= {config.min_productivity_whole}); "
        f"{len(artifact.nodes)} hierarchy nodes -> {args.out}"
    )
    return EXIT_OK


def cmd_aggregate(args: argparse.Namespace) -> int:
    dataset = _load_inputs(args)
    artifact = MinedArtifact.load(args.artifact)
    embeddings = load_embeddings(args.embeddings)
    before = len(artifact.nodes)
    artifact = aggregate_artifact(artifact, dataset, embeddings, cut=args.cut)
    artifact.save(args.out)
    print(f"{len(artifact.nodes) - before} aggregate shortcuts inserted -> {args.out}")
    return EXIT_OK


def _report_lines(report) -> list[str]:
    prod = report.group_productivity
    lines = [
        f"split: {report.selection.split or 'whole'} ({report.split_size} instances)",
        f"group coverage (dirty): {report.group_coverage}",
        f"clean: {len(report.clean_ids)}",
        f"disagreed instances: {report.disagreed_count}",
        f"group productivity: {'undefined' if prod is None else f'{prod:.4f}'}",
    ]
    if report.average_accuracy:
        acc = report.average_accuracy

        def fmt(v):
            return "undefined" if v is None else f"{v:.4f}"

        lines.append(
            "machine accuracy (avg): "
            f"whole {fmt(acc.whole)}, dirty {fmt(acc.dirty)} ({fmt(acc.delta_dirty)}), "
            f"clean {fmt(acc.clean)} ({fmt(acc.delta_clean)})"
        )
    return lines


def cmd_whatif(args: argparse.Namespace) -> int:
    dataset = _load_inputs(args)
    artifact = MinedArtifact.load(args.artifact)
    if artifact.is_stale_for(dataset):
        print("warning: artifact fingerprint does not match dataset", file=sys.stderr)
    selection = GroupSelection.of(_parse_ids(args), args.split)
    try:
        report = whatif_report(selection, artifact, dataset)
    except SelectionError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_REFERENCE
    if args.format == "json":
        print(json.dumps(report.to_json(), ensure_ascii=False, sort_keys=True, indent=1))
    else:
        print("\n".join(_report_lines(report)))
    return EXIT_OK


def cmd_remove(args: argparse.Namespace) -> int:
    dataset = _load_inputs(args)
    artifact = MinedArtifact.load(args.artifact)
    selection = GroupSelection.of(_parse_ids(args), args.split)
    try:
        new_dataset, new_artifact, comparison = remove_and_remine(selection, artifact, dataset)
    except SelectionError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_REFERENCE
    try:
        save_dataset(new_dataset, args.out_dataset)
        if args.out_artifact:
            new_artifact.save(args.out_artifact)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.format == "json":
        print(json.dumps(comparison, ensure_ascii=False, sort_keys=True, indent=1))
    else:
        print(f"removed {comparison['removed_instances']} instances -> {args.out_dataset}")
        print(
            f"selected shortcuts: {comparison['selected_before']} -> "
            f"{comparison['selected_after']} ({comparison['selected_delta']:+d})"
        )
        for form in comparison["disappeared"]:
            print(f"disappeared: {form}")
        for form in comparison["appeared"]:
            print(f"appeared: {form}")
        for form, presence in comparison["targets"].items():
            print(f"target {presence}: {form}")
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    artifact = MinedArtifact.load(args.artifact)
    nodes = [n for n in artifact.nodes.values() if n.selected or n.aggregated]
    if args.min_coverage is not None:
        nodes = [n for n in nodes if n.whole.coverage >= args.min_coverage]
    if args.min_productivity is not None:
        nodes = [
            n
            for n in nodes
            if n.whole.productivity is not None and n.whole.productivity >= args.min_productivity
        ]
    nodes.sort(key=lambda n: (-n.whole.coverage, n.id))
    splits = [args.split] if args.split else sorted(
        {scope for n in nodes for scope in n.stats if scope != "whole"}
    )
    header = ["id", "template", "prediction_label", "aggregated", "coverage", "productivity"]
    for split in splits:
        header += [f"coverage_{split}", f"productivity_{split}"]
    try:
        out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
        writer = csv.writer(out)
        writer.writerow(header)
        from .templates import canonical

        for node in nodes:
            whole = node.whole
            row = [
                node.id,
                canonical(node.template),
                whole.prediction_label,
                int(node.aggregated),
                whole.coverage,
                f"{whole.productivity:.6f}" if whole.productivity is not None else "",
            ]
            for split in splits:
                ss = node.stats.get(split)
                if ss is None or ss.coverage == 0:
                    row += [0, ""]
                else:
                    row += [ss.coverage, f"{ss.productivity:.6f}"]
            writer.writerow(row)
        if args.out:
            out.close()
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{len(nodes)} rows exported", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from . import server

    config = MiningConfig(
        min_coverage_whole=args.default_min_coverage,
        min_productivity_whole=args.default_min_productivity,
        max_gap=args.max_gap,
    )
    server.run(
        args.data_dir,
        host=args.host,
        port=args.port,
        config=config,
        cache_dir=args.cache_dir,
        seed=args.seed,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shortcutaudit",
        description="Mine, aggregate, and audit matching-based shortcuts in "
        "pre-annotated NLU classification datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine shortcuts and write an artifact")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    _add_mining_flags(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("aggregate", help="merge semantically similar sibling shortcuts")
    p.add_argument("--artifact", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cut", type=float, default=DEFAULT_CUT)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("whatif", help="dirty/clean what-if report for selected shortcuts")
    p.add_argument("--artifact", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--predictions")
    p.add_argument("--ids", action="append", default=[], help="shortcut ids (repeatable, comma-separable)")
    p.add_argument("--split")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("remove", help="remove covered instances and re-mine")
    p.add_argument("--artifact", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--predictions")
    p.add_argument("--ids", action="append", default=[])
    p.add_argument("--split")
    p.add_argument("--out-dataset", required=True)
    p.add_argument("--out-artifact")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_remove)

    p = sub.add_parser("export", help="dump the shortcut table as CSV")
    p.add_argument("--artifact", required=True)
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--split")
    p.add_argument("--min-coverage", type=int, default=None)
    p.add_argument("--min-productivity", type=float, default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--default-min-coverage", type=int, default=5)
    p.add_argument("--default-min-productivity", type=float, default=0.5)
    p.add_argument("--max-gap", type=int, default=None)
    p.add_argument("--cache-dir")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if not isinstance(exc, CorpusError) else EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
