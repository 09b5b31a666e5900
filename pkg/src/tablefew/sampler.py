"""Deterministic task-file sampling: uniform, one-per-website, stratified.

Selection is by seeded hash rank (FNV-1a over seed and task id) instead of
a stateful RNG stream: the chosen set is a pure function of file content
and seed, unchanged by line order, and reproducible in any language with
an FNV-1a implementation. Outputs are sorted by task id.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path
from typing import Iterable

from .hashing import rank64
from .model import ParseError, SamplePlan, SchemaError, Task, with_examples


def _task_rank(seed: int, task_id: str) -> tuple[int, str]:
    return (rank64(seed, task_id), task_id)


def _subset_examples(task: Task, seed: int, n: int | None) -> Task:
    """Keep the n hash-lowest examples, preserving original order."""
    if n is None or len(task.examples) <= n:
        return task
    ranked = sorted(
        range(len(task.examples)),
        key=lambda i: (rank64(seed, task.task_id, i), i),
    )
    keep = sorted(ranked[:n])
    return with_examples(task, (task.examples[i] for i in keep))


def sample_tasks(tasks: Iterable[Task], plan: SamplePlan) -> list[Task]:
    """Uniform hash-rank sample of up to ``plan.max_tasks`` tasks.

    Within each selected task, examples are subset to the plan's per-task
    cap the same way, keeping original relative order.
    """
    if plan.strategy != "uniform":
        raise ValueError(f"sample_tasks handles the uniform strategy, not {plan.strategy!r}")
    pool = list(tasks)
    if plan.max_tasks > len(pool):
        warnings.warn(
            f"requested {plan.max_tasks} tasks but only {len(pool)} available; "
            "taking all",
            stacklevel=2,
        )
    pool.sort(key=lambda t: _task_rank(plan.seed, t.task_id))
    chosen = pool[: plan.max_tasks]
    out = [_subset_examples(t, plan.seed, plan.max_examples_per_task) for t in chosen]
    out.sort(key=lambda t: t.task_id)
    return out


def unique_per_website(tasks: Iterable[Task], seed: int) -> list[Task]:
    """Keep the hash-lowest task per website; sorted by task id."""
    best: dict[str, Task] = {}
    for task in tasks:
        rank = _task_rank(seed, task.task_id)
        incumbent = best.get(task.website)
        if incumbent is None or rank < _task_rank(seed, incumbent.task_id):
            best[task.website] = task
    out = list(best.values())
    out.sort(key=lambda t: t.task_id)
    return out


def load_assignments(path: Path) -> dict[str, str]:
    """Read a JSONL assignment file mapping task_id to a stratum label."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(raw, dict) or "task_id" not in raw or "label" not in raw:
                raise SchemaError(f"line {lineno}: expected keys task_id and label")
            out[str(raw["task_id"])] = str(raw["label"])
    return out


def stratified_sample(
    tasks: Iterable[Task],
    key: str,
    assignments: dict[str, str] | None,
    per_stratum: int,
    seed: int,
    strata: list[str] | None = None,
) -> dict[str, list[Task]]:
    """Hash-rank selection of up to *per_stratum* tasks per stratum.

    For ``key="website"`` labels come from the tasks themselves; cluster
    and quality keys need an assignment map. Requested strata missing from
    the data raise; assignment ids missing from the task file only warn.
    """
    if key not in ("website", "cluster", "quality"):
        raise ValueError(f"unknown stratify key {key!r}")
    if key != "website" and assignments is None:
        raise ValueError(f"stratify key {key!r} requires an assignment file")

    pool = list(tasks)
    seen_ids = {t.task_id for t in pool}
    if assignments:
        missing = sum(1 for tid in assignments if tid not in seen_ids)
        if missing:
            warnings.warn(
                f"{missing} assignment ids not present in the task file",
                stacklevel=2,
            )

    by_stratum: dict[str, list[Task]] = {}
    for task in pool:
        if key == "website":
            label = task.website
        else:
            label = assignments.get(task.task_id) if assignments else None
            if label is None:
                continue
        by_stratum.setdefault(label, []).append(task)

    wanted = strata if strata is not None else sorted(by_stratum)
    absent = [s for s in wanted if s not in by_stratum]
    if absent:
        raise ValueError(f"requested strata absent from data: {absent}")

    out: dict[str, list[Task]] = {}
    for label in wanted:
        members = by_stratum[label]
        if per_stratum < len(members):
            members = sorted(members, key=lambda t: _task_rank(seed, t.task_id))[
                :per_stratum
            ]
        else:
            if per_stratum > len(members):
                warnings.warn(
                    f"stratum {label!r} has only {len(members)} tasks "
                    f"(requested {per_stratum}); taking all",
                    stacklevel=2,
                )
        out[label] = sorted(members, key=lambda t: t.task_id)
    return out


def stratum_file_name(stem: str, stratum: str) -> str:
    """CLI naming convention for per-stratum output files."""
    safe = "".join(ch if ch.isalnum() or ch in "-._" else "_" for ch in stratum)
    return f"{stem}.{safe}.jsonl"
