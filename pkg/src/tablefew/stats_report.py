"""Report merging and dataset descriptive statistics."""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .model import FilterReport, Task

# built datasets never go below 6 examples, but sampled variants may; the
# low bucket keeps the histogram total equal to the task count either way
HISTOGRAM_BUCKETS = ((0, 5), (6, 9), (10, 19), (20, 49), (50, 99), (100, None))


def merge_reports(a: FilterReport, b: FilterReport) -> FilterReport:
    """Pointwise sum of two reports over the same scope and stages."""
    if a.scope != b.scope:
        raise ValueError(f"scope mismatch: {a.scope!r} vs {b.scope!r}")
    if a.stage_names != b.stage_names:
        raise ValueError("stage name mismatch")
    return FilterReport(
        scope=a.scope,
        stage_names=a.stage_names,
        initial_count=a.initial_count + b.initial_count,
        rejected_by_stage={
            s: a.rejected_by_stage.get(s, 0) + b.rejected_by_stage.get(s, 0)
            for s in a.stage_names
        },
        remaining_count=a.remaining_count + b.remaining_count,
    )


def zero_report(scope: str, stage_names: tuple[str, ...]) -> FilterReport:
    return FilterReport(
        scope=scope,
        stage_names=stage_names,
        initial_count=0,
        rejected_by_stage={s: 0 for s in stage_names},
        remaining_count=0,
    )


def report_text(report: FilterReport) -> str:
    """Aligned plain-text table: stage, signed count, one line per stage."""
    rows = [(f"{report.scope} initial", report.initial_count)]
    rows += [
        (f"rejected {name}", -report.rejected_by_stage.get(name, 0))
        for name in report.stage_names
    ]
    rows.append((f"{report.scope} remaining", report.remaining_count))
    label_w = max(len(label) for label, _ in rows)
    count_w = max(len(f"{n:+,}" if n < 0 else f"{n:,}") for _, n in rows)
    lines = []
    for label, n in rows:
        text = f"{n:+,}" if n < 0 else f"{n:,}"
        lines.append(f"{label:<{label_w}}  {text:>{count_w}}")
    return "\n".join(lines)


@dataclass(frozen=True, slots=True)
class DatasetStats:
    task_count: int
    website_count: int
    examples_histogram: dict[str, int]
    median_examples: float
    top_websites: tuple[tuple[str, int, float], ...]  # (site, count, fraction)

    def to_dict(self) -> dict:
        return {
            "task_count": self.task_count,
            "website_count": self.website_count,
            "examples_histogram": self.examples_histogram,
            "median_examples": self.median_examples,
            "top_websites": [
                {"website": w, "tasks": n, "fraction": f}
                for w, n, f in self.top_websites
            ],
        }


def _bucket_label(lo: int, hi: int | None) -> str:
    return f"{lo}-{hi}" if hi is not None else f">={lo}"


def dataset_stats(tasks: Iterable[Task], top_n: int = 20) -> DatasetStats:
    """Counts, per-task example histogram, median, and top websites."""
    site_counts: Counter = Counter()
    sizes: list[int] = []
    histogram = Counter()
    for task in tasks:
        site_counts[task.website] += 1
        k = len(task.examples)
        sizes.append(k)
        for lo, hi in HISTOGRAM_BUCKETS:
            if k >= lo and (hi is None or k <= hi):
                histogram[_bucket_label(lo, hi)] += 1
                break
    total = len(sizes)
    top = tuple(
        (site, n, n / total)
        for site, n in sorted(site_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    )
    return DatasetStats(
        task_count=total,
        website_count=len(site_counts),
        examples_histogram={
            _bucket_label(lo, hi): histogram.get(_bucket_label(lo, hi), 0)
            for lo, hi in HISTOGRAM_BUCKETS
        },
        median_examples=float(statistics.median(sizes)) if sizes else 0.0,
        top_websites=top,
    )
