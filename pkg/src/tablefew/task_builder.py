"""Expand accepted tables into candidate tasks, one per column.

Each column is a potential output target: the remaining columns render as
the input, each value prefixed with its bracketed column header, and the
target header closes the input so a model knows where to continue:

    [Question] The lower jawbone is the [Answer]

followed by one trailing space. The output is the target column's cell,
verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

from .hashing import fnv1a64, fnv1a64_extend, hex16
from .model import Example, RawTable, Task


@dataclass(frozen=True, slots=True)
class CandidateTask:
    """A Task plus the column index it targets (pre task-filtering)."""

    task_id: str
    website: str
    url: str
    page_title: str
    target_header: str
    target_column_index: int
    examples: tuple[Example, ...]

    def to_task(self) -> Task:
        return Task(
            task_id=self.task_id,
            website=self.website,
            url=self.url,
            page_title=self.page_title,
            target_header=self.target_header,
            examples=self.examples,
        )


def render_input(row: list[str] | tuple[str, ...], header: list[str] | tuple[str, ...], target_index: int) -> str:
    """Render one row as an input string for the given target column.

    Segments are ``[header] value `` for every non-target column in
    original order, then ``[target_header] `` with no value. Cell values
    are used verbatim, so an empty cell leaves a double space.
    """
    if len(row) != len(header):
        raise ValueError("row and header must be the same length")
    if not 0 <= target_index < len(header):
        raise ValueError(f"target index {target_index} out of range")
    parts = []
    for j, value in enumerate(row):
        if j != target_index:
            parts.append(f"[{header[j]}] {value} ")
    parts.append(f"[{header[target_index]}] ")
    return "".join(parts)


def build_candidate_tasks(table: RawTable) -> list[CandidateTask]:
    """One candidate per column index; examples follow table row order.

    Examples with an output that trims to empty, or whose input columns
    are all empty, are dropped here; candidates left with too few
    examples are eliminated by the task filters downstream.
    """
    n_cols = len(table.header)
    # shared hash prefix: ids differ from task_id() output only in the
    # trailing column index, so hash url/table_index once per table
    id_prefix = fnv1a64(f"{table.url}\x1f{table.table_index}\x1f".encode("utf-8"))
    opening = [f"[{h}] " for h in table.header]

    # per-row segments "[header] value " are shared by every target column;
    # blanking the target's segment and appending its marker reproduces
    # render_input byte for byte
    per_target: list[list[Example]] = [[] for _ in range(n_cols)]
    for row in table.rows:
        segments = [opening[i] + row[i] + " " for i in range(n_cols)]
        non_empty = sum(1 for v in row if v)
        for j in range(n_cols):
            output = row[j]
            if not output or output.isspace():
                continue
            if non_empty == 1:  # the output is the only non-empty cell
                continue
            saved = segments[j]
            segments[j] = ""
            rendered = "".join(segments) + opening[j]
            segments[j] = saved
            per_target[j].append(Example(rendered, output))

    candidates = []
    for j in range(n_cols):
        tid = (
            f"{table.website}__"
            f"{hex16(fnv1a64_extend(id_prefix, str(j).encode('ascii')))}__col{j}"
        )
        candidates.append(
            CandidateTask(
                task_id=tid,
                website=table.website,
                url=table.url,
                page_title=table.page_title,
                target_header=table.header[j],
                target_column_index=j,
                examples=tuple(per_target[j]),
            )
        )
    return candidates
