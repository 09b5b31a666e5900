"""End-to-end build: corpus JSONL in, task JSONL + reports + manifest out.

Execution model: the main process streams and parses input lines, assigns
per-page table ordinals, and feeds records through the table cascade and
candidate builder (inline for ``jobs=1``, chunked over a process pool
otherwise). Candidate tasks carry a precomputed post-cap verdict, the
per-website cap selects survivors by seeded hash rank, and results are
written sorted by task id. Identical inputs and config produce identical
bytes for any worker count, because every decision is a pure function of
record content, configuration, and seed.

Memory stays bounded regardless of corpus length: rejected tables are
dropped immediately and the cap buffers at most twice the per-website
limit per site.
"""

from __future__ import annotations

import json
import multiprocessing
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Iterable, Iterator

from .hashing import fnv1a64, hex16
from .ingest import (
    REJECT_BAD_HEADER_INDEX,
    REJECT_BAD_URL,
    REJECT_NO_HEADER,
    CorpusRecord,
    LineError,
    RejectedTable,
    orient_rowwise,
    parse_corpus_stream,
)
from .model import DatasetManifest, FilterReport, Task, write_task_file
from .stats_report import report_text
from .table_filters import TABLE_STAGES, TableFilterConfig, filter_table
from .task_builder import CandidateTask, build_candidate_tasks
from .task_filters import (
    TASK_STAGES,
    TaskFilterConfig,
    WebsiteCap,
    collapse_duplicate_pairs,
    first_failing_stage,
)

INGEST_STAGES = (REJECT_NO_HEADER, REJECT_BAD_HEADER_INDEX, REJECT_BAD_URL)
TABLE_REPORT_STAGES = INGEST_STAGES + TABLE_STAGES

_CHUNK_RECORDS = 256


class ConfigError(ValueError):
    """Invalid build configuration; message names the offending field."""


@dataclass(frozen=True, slots=True)
class BuildConfig:
    table: TableFilterConfig
    task: TaskFilterConfig

    def effective_dict(self) -> dict:
        t = self.table
        k = self.task
        return {
            "table": {
                "min_unique_columns": t.min_unique_columns,
                "min_unique_rows": t.min_unique_rows,
                "max_junk_fraction": t.max_junk_fraction,
                "english_min_charset_fraction": t.english_min_charset_fraction,
                "english_min_stopword_rate": t.english_min_stopword_rate,
            },
            "task": {
                "max_tasks_per_website": k.max_tasks_per_website,
                "min_examples": k.min_examples,
                "min_output_classes": k.min_output_classes,
                "min_evenness": k.min_evenness,
                "cap_seed": k.cap_seed,
            },
        }

    def digest(self) -> str:
        payload = json.dumps(self.effective_dict(), sort_keys=True, separators=(",", ":"))
        return hex16(fnv1a64(payload.encode("utf-8")))


_TABLE_FIELDS = {
    "min_unique_columns": int,
    "min_unique_rows": int,
    "max_junk_fraction": float,
    "english_min_charset_fraction": float,
    "english_min_stopword_rate": float,
}
_TASK_FIELDS = {
    "max_tasks_per_website": int,
    "min_examples": int,
    "min_output_classes": int,
    "min_evenness": float,
    "cap_seed": int,
}


def _section(raw: dict, name: str, fields: dict[str, type]) -> dict:
    section = raw.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config field {name!r} must be an object")
    out = {}
    for key, value in section.items():
        if key not in fields:
            raise ConfigError(f"unknown config field {name}.{key}")
        want = fields[key]
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, want) or isinstance(value, bool):
            raise ConfigError(
                f"config field {name}.{key} must be {want.__name__}"
            )
        out[key] = value
    return out


def load_config(raw: dict | None, seed: int | None = None) -> BuildConfig:
    """Build a validated config from a parsed JSON object.

    *seed*, when given, overrides ``task.cap_seed`` (CLI --seed flag).
    Raises ConfigError naming the first invalid field.
    """
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - {"table", "task"}
    if unknown:
        raise ConfigError(f"unknown config field {sorted(unknown)[0]}")
    try:
        table = TableFilterConfig(**_section(raw, "table", _TABLE_FIELDS))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config section 'table': {exc}") from exc
    task_kwargs = _section(raw, "task", _TASK_FIELDS)
    if seed is not None:
        task_kwargs["cap_seed"] = seed
    try:
        task = TaskFilterConfig(english=table, **task_kwargs)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config section 'task': {exc}") from exc
    return BuildConfig(table=table, task=task)


@dataclass(slots=True)
class BuildResult:
    tables_report: FilterReport
    tasks_report: FilterReport
    manifest: DatasetManifest
    input_errors: list[LineError]
    task_count: int
    example_count: int


def _process_record(
    record: CorpusRecord,
    table_index: int,
    cfg: BuildConfig,
) -> tuple[str | None, list[tuple[CandidateTask, str | None]]]:
    """(table reject stage or None, candidate+verdict list)."""
    try:
        table = orient_rowwise(record, table_index)
    except RejectedTable as exc:
        return exc.reason, []
    verdict = filter_table(table, cfg.table)
    if verdict.table is None:
        return verdict.rejected_at, []
    out = []
    for cand in build_candidate_tasks(verdict.table):
        collapsed = collapse_duplicate_pairs(cand.examples)
        if collapsed is not cand.examples:
            cand = replace(cand, examples=collapsed)
        out.append((cand, first_failing_stage(cand, cfg.task, assume_collapsed=True)))
    return None, out


def _process_chunk(
    args: tuple[list[tuple[CorpusRecord, int]], BuildConfig],
) -> tuple[dict[str, int], int, list[tuple[CandidateTask, str | None]]]:
    """Worker entry point: a chunk of (record, table_index) pairs."""
    chunk, cfg = args
    rejects: Counter = Counter()
    accepted = 0
    candidates: list[tuple[CandidateTask, str | None]] = []
    for record, table_index in chunk:
        stage, cands = _process_record(record, table_index, cfg)
        if stage is None:
            accepted += 1
            candidates.extend(cands)
        else:
            rejects[stage] += 1
    return dict(rejects), accepted, candidates


def _indexed_records(
    lines: Iterable[str], fmt: str, errors: list[LineError]
) -> Iterator[tuple[CorpusRecord, int]]:
    """Assign each record its ordinal among same-URL tables, input order."""
    per_url: Counter = Counter()
    for record in parse_corpus_stream(lines, fmt, errors):
        index = per_url[record.url]
        per_url[record.url] += 1
        yield record, index


def _chunks(
    records: Iterator[tuple[CorpusRecord, int]], cfg: BuildConfig
) -> Iterator[tuple[list[tuple[CorpusRecord, int]], BuildConfig]]:
    chunk: list[tuple[CorpusRecord, int]] = []
    for item in records:
        chunk.append(item)
        if len(chunk) >= _CHUNK_RECORDS:
            yield chunk, cfg
            chunk = []
    if chunk:
        yield chunk, cfg


def run_build(
    lines: Iterable[str],
    fmt: str,
    cfg: BuildConfig,
    out_fh: IO[str],
    jobs: int = 1,
) -> BuildResult:
    """Run the full cascade over *lines* and write the task file."""
    errors: list[LineError] = []
    table_rejects: Counter = Counter()
    tables_initial = 0
    tables_accepted = 0
    tasks_initial = 0

    cap = WebsiteCap(cfg.task.max_tasks_per_website, cfg.task.cap_seed)

    records = _indexed_records(lines, fmt, errors)
    if jobs <= 1:
        results: Iterable = ( _process_chunk(c) for c in _chunks(records, cfg) )
        pool = None
    else:
        pool = multiprocessing.get_context("fork").Pool(jobs)
        results = pool.imap(_process_chunk, _chunks(records, cfg))
    try:
        for rejects, accepted, candidates in results:
            chunk_records = accepted + sum(rejects.values())
            tables_initial += chunk_records
            tables_accepted += accepted
            table_rejects.update(rejects)
            for cand, verdict in candidates:
                tasks_initial += 1
                cap.add(cand, payload=(cand, verdict))
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    retained, n_capped = cap.finish()
    task_rejects: Counter = Counter({s: 0 for s in TASK_STAGES})
    task_rejects["max-domain"] = n_capped
    survivors: list[Task] = []
    for cand, verdict in retained:  # type: ignore[misc]
        if verdict is None:
            survivors.append(cand.to_task())
        else:
            task_rejects[verdict] += 1

    survivors.sort(key=lambda t: t.task_id)
    task_count, example_count = write_task_file(survivors, out_fh)

    tables_report = FilterReport(
        scope="tables",
        stage_names=TABLE_REPORT_STAGES,
        initial_count=tables_initial,
        rejected_by_stage={s: table_rejects.get(s, 0) for s in TABLE_REPORT_STAGES},
        remaining_count=tables_accepted,
    )
    tasks_report = FilterReport(
        scope="tasks",
        stage_names=TASK_STAGES,
        initial_count=tasks_initial,
        rejected_by_stage={s: task_rejects.get(s, 0) for s in TASK_STAGES},
        remaining_count=task_count,
    )
    manifest = DatasetManifest(
        config_digest=cfg.digest(),
        seed=cfg.task.cap_seed,
        task_count=task_count,
        example_count=example_count,
        reports=(tables_report, tasks_report),
    )
    return BuildResult(
        tables_report=tables_report,
        tasks_report=tasks_report,
        manifest=manifest,
        input_errors=errors,
        task_count=task_count,
        example_count=example_count,
    )


def write_reports(result: BuildResult, fh: IO[str]) -> None:
    """Composite report JSON: both scopes plus input parse errors."""
    doc = {
        "tables": result.tables_report.to_dict(),
        "tasks": result.tasks_report.to_dict(),
        "input_errors": {
            "count": len(result.input_errors),
            "first": [
                {"line": e.line_number, "message": e.message}
                for e in result.input_errors[:20]
            ],
        },
    }
    json.dump(doc, fh, indent=2, ensure_ascii=False)
    fh.write("\n")


def write_manifest(result: BuildResult, fh: IO[str]) -> None:
    json.dump(result.manifest.to_dict(), fh, indent=2, ensure_ascii=False)
    fh.write("\n")


def build_files(
    input_path: Path,
    fmt: str,
    output_path: Path,
    report_path: Path | None,
    cfg: BuildConfig,
    jobs: int = 1,
) -> BuildResult:
    """File-level wrapper used by the CLI."""
    with open(input_path, "r", encoding="utf-8") as in_fh:
        with open(output_path, "w", encoding="utf-8") as out_fh:
            result = run_build(in_fh, fmt, cfg, out_fh, jobs=jobs)
    if report_path is not None:
        with open(report_path, "w", encoding="utf-8") as fh:
            write_reports(result, fh)
    manifest_path = output_path.with_suffix(".manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        write_manifest(result, fh)
    return result


def summary_text(result: BuildResult) -> str:
    return "\n\n".join(
        [report_text(result.tables_report), report_text(result.tasks_report)]
    )
