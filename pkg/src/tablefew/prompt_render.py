"""Serialize tasks into k-shot prompt/target pairs.

Default layout: each demonstration block is ``<input>\\n<output>``, blocks
are joined by blank lines, and the query input comes last with no trailing
newline, so the model continues right after the target-header marker. Both
separators are configuration points; goldens pin the defaults.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import IO, Iterable

from .hashing import rank64
from .model import Task

WITHIN_BLOCK_SEP = "\n"
BETWEEN_BLOCK_SEP = "\n\n"


class BudgetError(ValueError):
    """The character budget cannot fit even the query block."""


@dataclass(frozen=True, slots=True)
class RenderedPair:
    task_id: str
    prompt: str
    target: str
    options: tuple[str, ...]


def render_fewshot(
    task: Task,
    k: int,
    query_index: int,
    budget_chars: int | None = None,
    within_sep: str = WITHIN_BLOCK_SEP,
    between_sep: str = BETWEEN_BLOCK_SEP,
) -> tuple[str, str]:
    """Render k demonstrations plus the query input; returns (prompt, target).

    Demonstrations are the first k examples in task order, skipping the
    query. Under a budget, whole demonstration blocks are dropped from the
    front (never split); the query block is always intact and last.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    n = len(task.examples)
    if n < k + 1:
        raise ValueError(f"task has {n} examples; k={k} needs at least {k + 1}")
    if not 0 <= query_index < n:
        raise ValueError(f"query_index {query_index} out of range")
    demo_indices = [i for i in range(n) if i != query_index][:k]
    query = task.examples[query_index]
    blocks = [
        task.examples[i].input + within_sep + task.examples[i].output
        for i in demo_indices
    ]
    prompt = between_sep.join(blocks + [query.input])
    if budget_chars is not None:
        while len(prompt) > budget_chars and blocks:
            blocks = blocks[1:]
            prompt = between_sep.join(blocks + [query.input])
        if len(prompt) > budget_chars:
            raise BudgetError(
                f"budget of {budget_chars} chars cannot fit the query block "
                f"({len(prompt)} chars)"
            )
    return prompt, query.output


def choose_query_index(task: Task, k: int, seed: int) -> int:
    """Hash-rank query selection among example indices >= k."""
    n = len(task.examples)
    if n < k + 1:
        raise ValueError(f"task has {n} examples; k={k} needs at least {k + 1}")
    return min(range(k, n), key=lambda i: (rank64(seed, task.task_id, i), i))


def export_pairs(
    tasks: Iterable[Task],
    k: int,
    seed: int,
    budget_chars: int | None = None,
) -> tuple[list[RenderedPair], int]:
    """One prompt/target record per task; returns (pairs, skipped count).

    Tasks with at most k examples are skipped with a warning. Options are
    the task's distinct outputs, sorted.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    pairs: list[RenderedPair] = []
    skipped = 0
    for task in tasks:
        if len(task.examples) <= k:
            skipped += 1
            continue
        query_index = choose_query_index(task, k, seed)
        prompt, target = render_fewshot(task, k, query_index, budget_chars)
        options = tuple(sorted({ex.output for ex in task.examples}))
        pairs.append(RenderedPair(task.task_id, prompt, target, options))
    if skipped:
        warnings.warn(f"skipped {skipped} tasks with <= {k} examples", stacklevel=2)
    return pairs, skipped


def write_pairs(pairs: Iterable[RenderedPair], fh: IO[str]) -> int:
    """JSONL with fixed key order task_id, prompt, target, options."""
    n = 0
    for pair in pairs:
        fh.write(
            json.dumps(
                {
                    "task_id": pair.task_id,
                    "prompt": pair.prompt,
                    "target": pair.target,
                    "options": list(pair.options),
                },
                ensure_ascii=False,
                separators=(",", ":"),
            )
        )
        fh.write("\n")
        n += 1
    return n
