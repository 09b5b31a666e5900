"""Shared test fixtures and builders."""

from __future__ import annotations

import random

import pytest

from tablefew.model import Example, RawTable, Task, task_id
from tablefew.task_builder import CandidateTask


def make_table(
    header: list[str],
    rows: list[list[str]],
    website: str = "example.com",
    url: str = "https://example.com/page",
    table_index: int = 0,
) -> RawTable:
    return RawTable(
        website=website,
        url=url,
        page_title="a page title",
        header=tuple(header),
        rows=tuple(tuple(r) for r in rows),
        table_index=table_index,
    )


def make_task(
    outputs: list[str],
    website: str = "example.com",
    url: str = "https://example.com/page",
    target_header: str = "answer",
    table_index: int = 0,
    column: int = 1,
    inputs: list[str] | None = None,
) -> Task:
    if inputs is None:
        inputs = [f"[question] item {i} " for i in range(len(outputs))]
    examples = tuple(
        Example(input=f"{inp}[{target_header}] ", output=out)
        for inp, out in zip(inputs, outputs)
    )
    return Task(
        task_id=task_id(website, url, table_index, column),
        website=website,
        url=url,
        page_title="a page title",
        target_header=target_header,
        examples=examples,
    )


def make_candidate(
    outputs: list[str],
    website: str = "example.com",
    url: str = "https://example.com/page",
    target_header: str = "answer",
    table_index: int = 0,
    column: int = 1,
    inputs: list[str] | None = None,
) -> CandidateTask:
    task = make_task(outputs, website, url, target_header, table_index, column, inputs)
    return CandidateTask(
        task_id=task.task_id,
        website=task.website,
        url=task.url,
        page_title=task.page_title,
        target_header=task.target_header,
        target_column_index=column,
        examples=task.examples,
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
