"""Command-line entry point.

Subcommands wire the pipeline stages end to end:

    build           corpus JSONL -> task file + reports + manifest
    sample          task file -> deterministic subset (uniform / unique)
    slice           task file -> per-stratum files (website/cluster/quality)
    render          task file -> k-shot prompt/target pairs
    stats           task file -> descriptive statistics
    pca             example embeddings -> pooled, normalized, projected
    annotate-serve  local rating server for the annotation UI

Every command prints the effective config digest to stderr, and identical
inputs plus flags produce identical output bytes (the annotation server,
which records wall-clock timestamps, excepted).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from .embed_slice import (
    l2_normalize,
    load_example_embeddings,
    pca_fit,
    pca_project,
    pool_task_embeddings,
    write_embeddings,
)
from .hashing import fnv1a64, hex16
from .model import SamplePlan, read_task_file, write_task_file
from .pipeline import ConfigError, build_files, load_config, summary_text
from .prompt_render import export_pairs, write_pairs
from .sampler import (
    load_assignments,
    sample_tasks,
    stratified_sample,
    stratum_file_name,
    unique_per_website,
)
from .server import AnnotationServer
from .stats_report import dataset_stats, report_text

EXIT_BAD_INPUT = 2
EXIT_BAD_CONFIG = 3
EXIT_PORT_BUSY = 4
EXIT_ANNOTATIONS_UNWRITABLE = 5


def _digest_of(params: dict) -> str:
    payload = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hex16(fnv1a64(payload.encode("utf-8")))


def _print_digest(params: dict) -> None:
    print(f"config digest: {_digest_of(params)}", file=sys.stderr)


def _read_tasks(path: Path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return list(read_task_file(fh))
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _cmd_build(args: argparse.Namespace) -> int:
    raw_config = None
    if args.config is not None:
        try:
            raw_config = json.loads(Path(args.config).read_text("utf-8"))
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_BAD_CONFIG
        except json.JSONDecodeError as exc:
            print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
            return EXIT_BAD_CONFIG
    try:
        cfg = load_config(raw_config, seed=args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    _print_digest(cfg.effective_dict())
    input_path = Path(args.input)
    if not input_path.is_file() or not os.access(input_path, os.R_OK):
        print(f"error: cannot read input {input_path}", file=sys.stderr)
        return EXIT_BAD_INPUT
    result = build_files(
        input_path=input_path,
        fmt=args.format,
        output_path=Path(args.output),
        report_path=Path(args.report) if args.report else None,
        cfg=cfg,
        jobs=args.jobs,
    )
    print(summary_text(result), file=sys.stderr)
    if result.input_errors:
        print(
            f"{len(result.input_errors)} malformed input lines skipped",
            file=sys.stderr,
        )
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    tasks = _read_tasks(Path(args.input))
    if args.unique_per_website:
        params = {"op": "unique_per_website", "seed": args.seed}
        _print_digest(params)
        out = unique_per_website(tasks, args.seed)
    else:
        plan = SamplePlan(
            seed=args.seed,
            max_tasks=args.m,
            max_examples_per_task=args.n,
        )
        _print_digest(
            {"op": "sample", "seed": plan.seed, "m": plan.max_tasks, "n": plan.max_examples_per_task}
        )
        out = sample_tasks(tasks, plan)
    with open(args.output, "w", encoding="utf-8") as fh:
        n_tasks, _ = write_task_file(out, fh)
    print(f"wrote {n_tasks} tasks to {args.output}", file=sys.stderr)
    return 0


def _cmd_slice(args: argparse.Namespace) -> int:
    tasks = _read_tasks(Path(args.input))
    assignments = None
    if args.assignments:
        assignments = load_assignments(Path(args.assignments))
    strata = args.strata.split(",") if args.strata else None
    _print_digest(
        {
            "op": "slice",
            "key": args.key,
            "per_stratum": args.per_stratum,
            "seed": args.seed,
            "strata": strata,
        }
    )
    try:
        groups = stratified_sample(
            tasks, args.key, assignments, args.per_stratum, args.seed, strata
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    stem = str(args.output)
    if stem.endswith(".jsonl"):
        stem = stem[: -len(".jsonl")]
    for label, members in groups.items():
        path = stratum_file_name(stem, label)
        with open(path, "w", encoding="utf-8") as fh:
            write_task_file(members, fh)
        print(f"wrote {len(members)} tasks to {path}", file=sys.stderr)
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    tasks = _read_tasks(Path(args.input))
    _print_digest(
        {"op": "render", "k": args.k, "seed": args.seed, "budget_chars": args.budget_chars}
    )
    pairs, skipped = export_pairs(tasks, args.k, args.seed, args.budget_chars)
    with open(args.output, "w", encoding="utf-8") as fh:
        n = write_pairs(pairs, fh)
    print(f"wrote {n} pairs ({skipped} tasks skipped)", file=sys.stderr)
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    tasks = _read_tasks(Path(args.input))
    _print_digest({"op": "stats"})
    stats = dataset_stats(tasks)
    text = json.dumps(stats.to_dict(), indent=2, ensure_ascii=False)
    if args.output:
        Path(args.output).write_text(text + "\n", "utf-8")
    print(text)
    return 0


def _cmd_pca(args: argparse.Namespace) -> int:
    _print_digest({"op": "pca", "dim": args.dim, "seed": args.seed})
    try:
        with open(args.embeddings, "r", encoding="utf-8") as fh:
            example_matrix = load_example_embeddings(fh)
    except OSError as exc:
        print(f"error: cannot read {args.embeddings}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    pooled = pool_task_embeddings(example_matrix)
    normalized = l2_normalize(pooled)
    model = pca_fit(normalized, args.dim)
    projected = pca_project(model, normalized)
    with open(args.output, "w", encoding="utf-8") as fh:
        write_embeddings(projected, fh)
    if args.model_out:
        Path(args.model_out).write_text(
            json.dumps(model.to_dict(), ensure_ascii=False) + "\n", "utf-8"
        )
    print(
        f"projected {len(projected.ids)} tasks to {args.dim} dims", file=sys.stderr
    )
    return 0


def _cmd_annotate_serve(args: argparse.Namespace) -> int:
    port_override = os.environ.get("TABLEFEW_PORT", "").strip()
    port = int(port_override) if port_override else args.port
    _print_digest({"op": "annotate-serve", "port": port})
    annotations = Path(args.annotations)
    try:
        annotations.parent.mkdir(parents=True, exist_ok=True)
        with open(annotations, "ab"):
            pass
    except OSError as exc:
        print(f"error: annotations file unwritable: {exc}", file=sys.stderr)
        return EXIT_ANNOTATIONS_UNWRITABLE
    try:
        server = AnnotationServer(
            tasks_path=Path(args.tasks),
            annotations_path=annotations,
            port=port,
            annotator=args.annotator,
        )
    except OSError as exc:
        print(f"error: cannot bind port {port}: {exc}", file=sys.stderr)
        return EXIT_PORT_BUSY
    print(f"serving on http://127.0.0.1:{server.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tablefew",
        description="Convert web-table corpora into few-shot task datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="run the full corpus-to-tasks pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("wdc", "canonical"), default="wdc")
    p.add_argument("--output", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="per-website cap seed")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("sample", help="deterministic task subsets")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--m", type=int, default=5000, help="max tasks")
    p.add_argument("--n", type=int, default=None, help="max examples per task")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--unique-per-website",
        action="store_true",
        help="keep one task per website instead of a uniform sample",
    )
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("slice", help="per-stratum task files")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="stem for <stem>.<stratum>.jsonl")
    p.add_argument("--key", choices=("website", "cluster", "quality"), required=True)
    p.add_argument("--assignments", default=None, help="JSONL of {task_id, label}")
    p.add_argument("--per-stratum", type=int, default=200)
    p.add_argument("--strata", default=None, help="comma-separated stratum labels")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_slice)

    p = sub.add_parser("render", help="k-shot prompt/target pairs")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-chars", type=int, default=None)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("stats", help="dataset descriptive statistics")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("pca", help="pool, normalize and project embeddings")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--model-out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("annotate-serve", help="serve the annotation UI")
    p.add_argument("--tasks", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--port", type=int, default=7707)
    p.add_argument("--annotator", default="anonymous")
    p.set_defaults(func=_cmd_annotate_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    warnings.simplefilter("default")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
