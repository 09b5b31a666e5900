"""Task-level filter cascade.

Stage order (the per-website cap runs first):

    max-domain, min-rows, one-to-many, min-classes, non-english-output,
    class-balance

The cap keeps a deterministic pseudo-random subset per website, selected by
seeded hash rank, so results do not depend on stream order or worker
count. Later stages are pure per-task checks. Exactly one stage is charged
per rejected task, so the report always balances.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from .hashing import rank64
from .model import Example, FilterReport
from .table_filters import TableFilterConfig, is_english_text
from .task_builder import CandidateTask

STAGE_MAX_DOMAIN = "max-domain"
STAGE_MIN_ROWS = "min-rows"
STAGE_ONE_TO_MANY = "one-to-many"
STAGE_MIN_CLASSES = "min-classes"
STAGE_NON_ENGLISH_OUTPUT = "non-english-output"
STAGE_CLASS_BALANCE = "class-balance"

TASK_STAGES = (
    STAGE_MAX_DOMAIN,
    STAGE_MIN_ROWS,
    STAGE_ONE_TO_MANY,
    STAGE_MIN_CLASSES,
    STAGE_NON_ENGLISH_OUTPUT,
    STAGE_CLASS_BALANCE,
)


@dataclass(frozen=True, slots=True)
class TaskFilterConfig:
    max_tasks_per_website: int = 2500
    min_examples: int = 6
    min_output_classes: int = 2
    min_evenness: float = 0.7
    cap_seed: int = 0
    english: TableFilterConfig = TableFilterConfig()

    def __post_init__(self) -> None:
        if self.max_tasks_per_website < 1:
            raise ValueError("max_tasks_per_website must be >= 1")
        if self.min_examples < 1 or self.min_output_classes < 1:
            raise ValueError("min_examples and min_output_classes must be >= 1")
        if not 0.0 <= self.min_evenness <= 1.0:
            raise ValueError("min_evenness must be in [0, 1]")


def shannon_evenness(class_counts: dict[str, int] | Counter) -> float:
    """Normalized Shannon entropy H/ln(C) of a label distribution.

    0.0 for a single class; 1.0 for a perfectly balanced one. Natural log
    throughout; the normalization makes the base irrelevant. Clamped to
    [0, 1] against rounding.
    """
    if not class_counts:
        raise ValueError("class_counts must be non-empty")
    if any(n < 1 for n in class_counts.values()):
        raise ValueError("all class counts must be >= 1")
    c = len(class_counts)
    if c == 1:
        return 0.0
    total = sum(class_counts.values())
    h = 0.0
    for n in class_counts.values():
        p = n / total
        h -= p * math.log(p)
    return min(1.0, max(0.0, h / math.log(c)))


def meets_min_evenness(evenness: float, min_evenness: float) -> bool:
    """Keep-side comparison: scores below the threshold are rejected,
    a score exactly at the threshold is kept."""
    return evenness >= min_evenness


def collapse_duplicate_pairs(examples: tuple[Example, ...]) -> tuple[Example, ...]:
    """Drop exact (input, output) repeats, keeping first occurrences."""
    seen: set[Example] = set()
    out = []
    for ex in examples:
        if ex not in seen:
            seen.add(ex)
            out.append(ex)
    if len(out) == len(examples):
        return examples
    return tuple(out)


def reject_one_to_many(task: CandidateTask) -> bool:
    """True (reject) iff some input maps to two or more distinct outputs.

    Duplicate (input, output) pairs collapse to one example before the
    check, so exact repeats alone never reject a task.
    """
    if not task.examples:
        raise ValueError("task must have at least one example")
    outputs_by_input: dict[str, str] = {}
    for ex in collapse_duplicate_pairs(task.examples):
        prev = outputs_by_input.get(ex.input)
        if prev is None:
            outputs_by_input[ex.input] = ex.output
        elif prev != ex.output:
            return True
    return False


def first_failing_stage(
    task: CandidateTask, cfg: TaskFilterConfig, assume_collapsed: bool = False
) -> str | None:
    """First post-cap stage the task fails, or None if it survives.

    The task is checked with duplicate pairs collapsed, matching what
    apply_task_filters emits for survivors; pass ``assume_collapsed`` when
    the caller has already collapsed the examples.
    """
    examples = task.examples if assume_collapsed else collapse_duplicate_pairs(task.examples)
    if len(examples) < cfg.min_examples:
        return STAGE_MIN_ROWS
    outputs_by_input: dict[str, str] = {}
    counts: dict[str, int] = {}
    for ex in examples:
        output = ex.output
        prev = outputs_by_input.setdefault(ex.input, output)
        if prev != output:
            return STAGE_ONE_TO_MANY
        counts[output] = counts.get(output, 0) + 1
    if len(counts) < cfg.min_output_classes:
        return STAGE_MIN_CLASSES
    if not is_english_text(" ".join(ex.output for ex in examples), cfg.english):
        return STAGE_NON_ENGLISH_OUTPUT
    # all-distinct outputs are perfectly even (H/ln C == 1 exactly)
    if len(counts) < len(examples):
        if not meets_min_evenness(shannon_evenness(counts), cfg.min_evenness):
            return STAGE_CLASS_BALANCE
    return None


def cap_rank(cap_seed: int, task_id: str) -> int:
    """Rank key for the per-website cap; depends only on seed and id."""
    return rank64(cap_seed, task_id)


class WebsiteCap:
    """Streaming per-website selection of the cap-lowest hash ranks.

    Keeps at most ``2 * cap`` buffered candidates per website: whenever a
    website's buffer doubles the cap it is pruned back to the cap-smallest
    (rank, task_id) pairs, so memory stays bounded no matter how many
    tasks one website floods. Ranks are computed lazily: a site that
    never exceeds the cap never pays for rank hashing.
    """

    def __init__(self, cap: int, seed: int):
        if cap < 1:
            raise ValueError("cap must be >= 1")
        self.cap = cap
        self.seed = seed
        # per site: list of [task_id, payload, rank-or-None]
        self._buffers: dict[str, list[list]] = {}
        self._seen: Counter = Counter()

    def add(self, task: CandidateTask, payload: object = None) -> None:
        buf = self._buffers.setdefault(task.website, [])
        buf.append([task.task_id, payload if payload is not None else task, None])
        self._seen[task.website] += 1
        if len(buf) >= 2 * self.cap:
            self._prune(buf)

    def _prune(self, buf: list[list]) -> None:
        seed = self.seed
        for entry in buf:
            if entry[2] is None:
                entry[2] = cap_rank(seed, entry[0])
        buf.sort(key=lambda e: (e[2], e[0]))
        del buf[self.cap :]

    def finish(self) -> tuple[list[object], int]:
        """(retained payloads, site-sorted then id-sorted; rejected count)."""
        retained: list[object] = []
        rejected = 0
        for website in sorted(self._buffers):
            buf = self._buffers[website]
            if len(buf) > self.cap:
                self._prune(buf)
            buf.sort(key=lambda e: e[0])
            retained.extend(e[1] for e in buf)
            rejected += self._seen[website] - len(buf)
        return retained, rejected


def cap_per_website(
    tasks: Iterable[CandidateTask], cfg: TaskFilterConfig
) -> tuple[list[CandidateTask], int]:
    """Retain up to the cap per website by seeded hash order.

    Returns (retained candidates, number rejected). The retained set is a
    pure function of (cap_seed, task ids); input order never matters.
    """
    cap = WebsiteCap(cfg.max_tasks_per_website, cfg.cap_seed)
    for task in tasks:
        cap.add(task)
    return cap.finish()  # type: ignore[return-value]


def apply_task_filters(
    tasks: Iterable[CandidateTask], cfg: TaskFilterConfig | None = None
) -> tuple[list[CandidateTask], FilterReport]:
    """Run the six-stage cascade and return survivors plus the report.

    Survivors carry duplicate-collapsed examples. Exactly one stage is
    charged per rejection; the report balances by construction.
    """
    cfg = cfg or TaskFilterConfig()
    rejected: Counter = Counter()
    initial = 0

    cap = WebsiteCap(cfg.max_tasks_per_website, cfg.cap_seed)
    for task in tasks:
        initial += 1
        cap.add(task)
    retained, n_capped = cap.finish()
    rejected[STAGE_MAX_DOMAIN] = n_capped

    survivors: list[CandidateTask] = []
    for task in retained:
        stage = first_failing_stage(task, cfg)
        if stage is None:
            collapsed = collapse_duplicate_pairs(task.examples)
            if len(collapsed) != len(task.examples):
                task = CandidateTask(
                    task_id=task.task_id,
                    website=task.website,
                    url=task.url,
                    page_title=task.page_title,
                    target_header=task.target_header,
                    target_column_index=task.target_column_index,
                    examples=collapsed,
                )
            survivors.append(task)
        else:
            rejected[stage] += 1

    report = FilterReport(
        scope="tasks",
        stage_names=TASK_STAGES,
        initial_count=initial,
        rejected_by_stage={s: rejected.get(s, 0) for s in TASK_STAGES},
        remaining_count=initial - sum(rejected.values()),
    )
    return survivors, report


def iter_filtered(
    tasks: Iterable[CandidateTask], cfg: TaskFilterConfig | None = None
) -> Iterator[CandidateTask]:
    survivors, _ = apply_task_filters(tasks, cfg)
    return iter(survivors)
