"""Shared data model and the canonical on-disk task encoding.

All pipeline stages exchange the immutable value types defined here. Tasks
persist as UTF-8 JSONL with a fixed key order so that golden files are
byte-stable across runs, platforms, and worker counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple, TextIO

from .hashing import fnv1a64, hex16

TASK_FILE_FORMAT = 1

_SEP = "\x1f"


class ParseError(ValueError):
    """A line could not be parsed as JSON."""


class SchemaError(ValueError):
    """A parsed record is missing a required key or has a wrong type."""


class ValidationError(ValueError):
    """A structurally valid record violates a model invariant."""


@dataclass(frozen=True, slots=True)
class RawTable:
    """A normalized row-wise table with provenance.

    ``website`` is the source hostname, lower-cased, with one leading
    ``www.`` stripped; subdomains are retained. Every row has exactly
    ``len(header)`` cells.
    """

    website: str
    url: str
    page_title: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    table_index: int

    def __post_init__(self) -> None:
        if len(self.header) < 1:
            raise ValidationError("table header must have at least one column")
        if self.table_index < 0:
            raise ValidationError("table_index must be >= 0")
        width = len(self.header)
        if any(len(row) != width for row in self.rows):
            for i, row in enumerate(self.rows):
                if len(row) != width:
                    raise ValidationError(
                        f"row {i} has {len(row)} cells, header has {width}"
                    )


class Example(NamedTuple):
    """One rendered input/output pair of a task."""

    input: str
    output: str


@dataclass(frozen=True, slots=True)
class Task:
    """A few-shot task extracted from one target column of one table."""

    task_id: str
    website: str
    url: str
    page_title: str
    target_header: str
    examples: tuple[Example, ...]


@dataclass(frozen=True, slots=True)
class FilterReport:
    """Accept/reject accounting for one filter cascade.

    Invariant: ``remaining_count == initial_count - sum(rejected_by_stage
    .values())`` exactly; every processed item is charged to at most one
    stage.
    """

    scope: str  # "tables" or "tasks"
    stage_names: tuple[str, ...]
    initial_count: int
    rejected_by_stage: dict[str, int]
    remaining_count: int

    def __post_init__(self) -> None:
        if self.scope not in ("tables", "tasks"):
            raise ValidationError(f"unknown report scope {self.scope!r}")
        unknown = set(self.rejected_by_stage) - set(self.stage_names)
        if unknown:
            raise ValidationError(f"rejected stages not declared: {sorted(unknown)}")
        if any(v < 0 for v in self.rejected_by_stage.values()) or (
            self.initial_count < 0 or self.remaining_count < 0
        ):
            raise ValidationError("report counts must be >= 0")
        rejected = sum(self.rejected_by_stage.values())
        if self.remaining_count != self.initial_count - rejected:
            raise ValidationError(
                f"report does not balance: {self.initial_count} - {rejected} "
                f"!= {self.remaining_count}"
            )

    def to_dict(self) -> dict:
        return {
            "scope": self.scope,
            "initial": self.initial_count,
            "stages": [
                {"name": name, "rejected": self.rejected_by_stage.get(name, 0)}
                for name in self.stage_names
            ],
            "remaining": self.remaining_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> FilterReport:
        stages = d["stages"]
        return cls(
            scope=d["scope"],
            stage_names=tuple(s["name"] for s in stages),
            initial_count=d["initial"],
            rejected_by_stage={s["name"]: s["rejected"] for s in stages},
            remaining_count=d["remaining"],
        )


@dataclass(frozen=True, slots=True)
class SamplePlan:
    """Parameters of one deterministic sampling run."""

    seed: int
    max_tasks: int
    max_examples_per_task: int | None = None  # None = unlimited
    strategy: str = "uniform"  # uniform | unique_per_website | stratified
    stratify_key: str | None = None  # website | cluster | quality

    def __post_init__(self) -> None:
        if self.strategy not in ("uniform", "unique_per_website", "stratified"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if (self.stratify_key is not None) != (self.strategy == "stratified"):
            raise ValueError("stratify_key is required iff strategy is stratified")
        if self.stratify_key is not None and self.stratify_key not in (
            "website",
            "cluster",
            "quality",
        ):
            raise ValueError(f"unknown stratify_key {self.stratify_key!r}")
        if self.max_tasks < 1:
            raise ValueError("max_tasks must be >= 1")
        if self.max_examples_per_task is not None and self.max_examples_per_task < 2:
            raise ValueError(
                "max_examples_per_task must be >= 2 "
                "(one demonstration plus one query)"
            )


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    """One human quality rating for one task."""

    task_id: str
    rating: int
    annotator: str
    timestamp: int
    notes: str | None = None

    def __post_init__(self) -> None:
        if self.rating not in (0, 1, 2):
            raise ValidationError(f"rating must be 0, 1 or 2, got {self.rating}")

    def to_dict(self) -> dict:
        d = {
            "task_id": self.task_id,
            "rating": self.rating,
            "annotator": self.annotator,
            "timestamp": self.timestamp,
        }
        if self.notes is not None:
            d["notes"] = self.notes
        return d

    @classmethod
    def from_dict(cls, d: dict) -> AnnotationRecord:
        return cls(
            task_id=d["task_id"],
            rating=d["rating"],
            annotator=d.get("annotator", ""),
            timestamp=d.get("timestamp", 0),
            notes=d.get("notes"),
        )


@dataclass(frozen=True, slots=True)
class DatasetManifest:
    """Summary record emitted next to a built task file."""

    config_digest: str  # 16 hex chars of the effective config hash
    seed: int
    task_count: int
    example_count: int
    reports: tuple[FilterReport, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "format": TASK_FILE_FORMAT,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "task_count": self.task_count,
            "example_count": self.example_count,
            "reports": [r.to_dict() for r in self.reports],
        }


def task_id(website: str, url: str, table_index: int, target_column_index: int) -> str:
    """Stable content-derived identifier for one table column's task.

    Layout: ``<website>__<hex16>__col<j>`` where hex16 is the FNV-1a/64
    hash of ``url 0x1F table_index 0x1F target_column_index`` in UTF-8.
    """
    if not website:
        raise ValueError("website must be non-empty")
    payload = f"{url}{_SEP}{table_index}{_SEP}{target_column_index}".encode("utf-8")
    return f"{website}__{hex16(fnv1a64(payload))}__col{target_column_index}"


# shared encoder: json.dumps builds a fresh JSONEncoder per call when any
# non-default option is set, which is measurable in the task-writing loop
_ENCODE = json.JSONEncoder(ensure_ascii=False, separators=(",", ":")).encode


def encode_task(task: Task) -> str:
    """Encode a task as one JSONL line with fixed key order, no padding."""
    return _ENCODE(
        {
            "task_id": task.task_id,
            "website": task.website,
            "url": task.url,
            "page_title": task.page_title,
            "target_header": task.target_header,
            "examples": [{"input": e.input, "output": e.output} for e in task.examples],
        }
    )


_TASK_KEYS = ("task_id", "website", "url", "page_title", "target_header", "examples")


def decode_task(line: str, line_number: int | None = None) -> Task:
    """Decode one JSONL line into a validated Task."""
    where = f"line {line_number}: " if line_number is not None else ""
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}task record must be a JSON object")
    for key in _TASK_KEYS:
        if key not in raw:
            raise SchemaError(f"{where}missing key {key!r}")
    if not isinstance(raw["examples"], list):
        raise SchemaError(f"{where}'examples' must be an array")
    examples = []
    for i, ex in enumerate(raw["examples"]):
        if not isinstance(ex, dict) or "input" not in ex or "output" not in ex:
            raise SchemaError(f"{where}example {i} must have 'input' and 'output'")
        examples.append(Example(input=ex["input"], output=ex["output"]))
    task = Task(
        task_id=raw["task_id"],
        website=raw["website"],
        url=raw["url"],
        page_title=raw["page_title"],
        target_header=raw["target_header"],
        examples=tuple(examples),
    )
    validate_task(task, where=where)
    return task


def validate_task(task: Task, where: str = "") -> None:
    """Check the Task invariants that hold for any persisted task.

    The >= 6 example floor is a task-filter guarantee, not a storage
    invariant: sampled variants may legitimately carry fewer examples
    (down to 2), so storage validation requires only a non-empty example
    list plus per-example well-formedness.
    """
    if not task.task_id:
        raise ValidationError(f"{where}task_id must be non-empty")
    if not task.website:
        raise ValidationError(f"{where}website must be non-empty")
    if not task.examples:
        raise ValidationError(f"{where}task must have at least one example")
    marker = f"[{task.target_header}] "
    for i, ex in enumerate(task.examples):
        if not ex.input:
            raise ValidationError(f"{where}example {i} has empty input")
        if not ex.output.strip():
            raise ValidationError(f"{where}example {i} has empty output")
        if not ex.input.endswith(marker):
            raise ValidationError(
                f"{where}example {i} input does not end with the "
                f"target-header marker {marker!r}"
            )


def write_task_file(tasks: Iterable[Task], fh: TextIO) -> tuple[int, int]:
    """Write tasks as JSONL; returns (task_count, example_count)."""
    n_tasks = 0
    n_examples = 0
    for task in tasks:
        fh.write(encode_task(task))
        fh.write("\n")
        n_tasks += 1
        n_examples += len(task.examples)
    return n_tasks, n_examples


def read_task_file(fh: TextIO) -> Iterator[Task]:
    """Yield validated tasks from a JSONL stream."""
    for i, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        yield decode_task(line, line_number=i)


def with_examples(task: Task, examples: Iterable[Example]) -> Task:
    """Copy of *task* with a different example tuple."""
    return replace(task, examples=tuple(examples))
