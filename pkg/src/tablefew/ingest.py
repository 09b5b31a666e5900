"""Corpus record parsing and row-wise orientation.

Reads JSONL corpus files in two schemas:

* ``wdc`` — keys ``relation`` (column-major), ``url``, ``pageTitle``,
  ``hasHeader``, ``headerPosition`` (integer or ``"FIRST_ROW"``),
  ``tableOrientation`` (``"HORIZONTAL"``/``"VERTICAL"``).
* ``canonical`` — keys ``rows`` (row-major), ``url``, ``page_title``,
  ``header_row_index``, ``orientation`` (``horizontal``/``vertical``).

Parsing is streaming: memory stays bounded by one record regardless of
corpus length, and output order equals input order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator
from urllib.parse import urlsplit

from .model import RawTable

FORMATS = ("wdc", "canonical")

# orient_rowwise reject reasons, in the order they can fire
REJECT_NO_HEADER = "no-header"
REJECT_BAD_HEADER_INDEX = "bad-header-index"
REJECT_BAD_URL = "bad-url"


@dataclass(frozen=True, slots=True)
class CorpusRecord:
    """One raw corpus table, column-major, orientation not yet normalized."""

    relation: tuple[tuple[str, ...], ...]
    url: str
    page_title: str
    has_header: bool
    header_row_index: int
    orientation: str  # horizontal | vertical


@dataclass(frozen=True, slots=True)
class LineError:
    line_number: int
    message: str


class RejectedTable(Exception):
    """A record that cannot become a RawTable; carries the stage name."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@lru_cache(maxsize=4096)
def _website_of_origin(origin: str) -> str:
    try:
        host = urlsplit(origin).hostname or ""
    except ValueError:
        return ""
    if host.startswith("www."):
        host = host[4:]
    return host


def website_of(url: str) -> str:
    """Hostname of *url*, lower-cased, one leading ``www.`` stripped.

    Cached on the scheme+authority prefix, which repeats across every
    page of a site even though full URLs do not.
    """
    scheme_end = url.find("://")
    if scheme_end != -1:
        path_start = url.find("/", scheme_end + 3)
        if path_start != -1:
            return _website_of_origin(url[:path_start])
    return _website_of_origin(url)


# leading/trailing whitespace, a run of two, or any non-space whitespace
_NEEDS_NORMALIZE = re.compile(r"^\s|\s\s|[^\S ]|\s$")


def normalize_cell(text: str) -> str:
    """Collapse internal whitespace runs to one space and trim the ends."""
    if _NEEDS_NORMALIZE.search(text) is None:
        return text
    return " ".join(text.split())


def _cells(value: object) -> tuple[str, ...]:
    if not isinstance(value, list):
        raise ValueError("relation entries must be arrays")
    return tuple(
        normalize_cell(c if isinstance(c, str) else "" if c is None else str(c))
        for c in value
    )


def _parse_wdc(raw: dict) -> CorpusRecord:
    relation = raw["relation"]
    if not isinstance(relation, list) or not relation:
        raise ValueError("'relation' must be a non-empty array")
    cols = tuple(_cells(c) for c in relation)
    lengths = {len(c) for c in cols}
    if len(lengths) != 1:
        raise ValueError("non-rectangular relation")
    header_pos = raw.get("headerPosition", 0)
    if isinstance(header_pos, str):
        # WDC string positions ("FIRST_ROW" etc.) normalize to row 0 of the
        # oriented grid; vertical tables' first column becomes row 0 anyway.
        header_pos = 0
    orientation = str(raw.get("tableOrientation", "HORIZONTAL")).lower()
    if orientation not in ("horizontal", "vertical"):
        raise ValueError(f"unknown tableOrientation {raw.get('tableOrientation')!r}")
    return CorpusRecord(
        relation=cols,
        url=str(raw.get("url", "")),
        page_title=normalize_cell(str(raw.get("pageTitle", ""))),
        has_header=bool(raw.get("hasHeader", False)),
        header_row_index=int(header_pos),
        orientation=orientation,
    )


def _parse_canonical(raw: dict) -> CorpusRecord:
    rows = raw["rows"]
    if not isinstance(rows, list) or not rows:
        raise ValueError("'rows' must be a non-empty array")
    row_major = tuple(_cells(r) for r in rows)
    lengths = {len(r) for r in row_major}
    if len(lengths) != 1:
        raise ValueError("non-rectangular rows")
    # store column-major like the WDC path; orientation semantics are shared
    cols = tuple(zip(*row_major)) if row_major[0] else ()
    if not cols:
        raise ValueError("rows must have at least one column")
    orientation = str(raw.get("orientation", "horizontal")).lower()
    if orientation not in ("horizontal", "vertical"):
        raise ValueError(f"unknown orientation {raw.get('orientation')!r}")
    header_row_index = raw.get("header_row_index")
    return CorpusRecord(
        relation=cols,
        url=str(raw.get("url", "")),
        page_title=normalize_cell(str(raw.get("page_title", ""))),
        has_header=header_row_index is not None,
        header_row_index=int(header_row_index) if header_row_index is not None else 0,
        orientation=orientation,
    )


_PARSERS: dict[str, Callable[[dict], CorpusRecord]] = {
    "wdc": _parse_wdc,
    "canonical": _parse_canonical,
}


def parse_corpus_stream(
    lines: Iterable[str],
    fmt: str = "wdc",
    errors: list[LineError] | None = None,
) -> Iterator[CorpusRecord]:
    """Yield one CorpusRecord per well-formed line.

    Malformed lines are appended to *errors* (if given) and skipped; they
    never abort the stream.
    """
    if fmt not in _PARSERS:
        raise ValueError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
    parse = _PARSERS[fmt]
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
            if not isinstance(raw, dict):
                raise ValueError("record must be a JSON object")
            yield parse(raw)
        except (ValueError, KeyError, TypeError) as exc:
            if errors is not None:
                errors.append(LineError(lineno, str(exc)))


def orient_rowwise(record: CorpusRecord, table_index: int = 0) -> RawTable:
    """Normalize a record so instances are rows, then split off the header.

    The stored relation is column-major; transposing it yields the grid as
    rendered on the page. Vertical tables list instances along columns, so
    they get one more transpose (i.e. the stored relation already is the
    row-wise grid). Raises RejectedTable with a stage name on records this
    pipeline cannot use.
    """
    if not record.has_header:
        raise RejectedTable(REJECT_NO_HEADER)
    if record.orientation == "vertical":
        grid = record.relation
    else:
        grid = tuple(zip(*record.relation))
    if record.header_row_index < 0 or record.header_row_index >= len(grid):
        raise RejectedTable(REJECT_BAD_HEADER_INDEX)
    website = website_of(record.url)
    if not website:
        raise RejectedTable(REJECT_BAD_URL)
    header = grid[record.header_row_index]
    rows = grid[: record.header_row_index] + grid[record.header_row_index + 1 :]
    return RawTable(
        website=website,
        url=record.url,
        page_title=record.page_title,
        header=header,
        rows=rows,
        table_index=table_index,
    )
