"""Table-level filter cascade: dedup, minimum dimensions, English check,
junk-token fraction.

The junk test uses a deterministic rule-based token classifier instead of a
neural part-of-speech tagger, so the pipeline is self-contained and
reproducible. The classifier is pluggable through ``junk_token_fraction``'s
``classify`` argument; the default heuristic assigns exactly one class per
token from character composition plus the bundled common-word lexicon.
"""

from __future__ import annotations

import re
import string
import unicodedata
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

from .lexicons import common_words, stopwords
from .model import RawTable

STAGE_MIN_ROWS = "min-rows"
STAGE_NON_ENGLISH = "non-english"
STAGE_JUNK_TOKENS = "junk-tokens"

TABLE_STAGES = (STAGE_MIN_ROWS, STAGE_NON_ENGLISH, STAGE_JUNK_TOKENS)


class TokenClass(Enum):
    WORD = "word"
    NUMERAL = "numeral"
    PROPER_NOUN = "proper-noun"
    SYMBOL = "symbol"
    PUNCTUATION = "punctuation"
    OTHER = "other"


@dataclass(frozen=True, slots=True)
class TableFilterConfig:
    min_unique_columns: int = 2
    min_unique_rows: int = 6
    max_junk_fraction: float = 0.20
    english_min_charset_fraction: float = 0.70
    english_min_stopword_rate: float = 0.05

    def __post_init__(self) -> None:
        if self.min_unique_columns < 1 or self.min_unique_rows < 1:
            raise ValueError("minimum dimensions must be >= 1")
        for name in (
            "max_junk_fraction",
            "english_min_charset_fraction",
            "english_min_stopword_rate",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


# Per-character kinds: P punctuation, S symbol, D digit, A letter, O other.
# Symbol characters take precedence over Unicode punctuation categories:
# '#', '%', '@', '&' are category Po but read as symbols in table cells.
_SYMBOL_CHARS = frozenset("#%@&$+=*^~|<>°µ§©®™€£¥₹¢₩×÷±")
_PUNCT_CHARS = frozenset(string.punctuation) - _SYMBOL_CHARS


@lru_cache(maxsize=1 << 16)
def _unicode_kind(ch: str) -> str:
    if ch in _SYMBOL_CHARS or unicodedata.category(ch)[0] == "S":
        return "S"
    if ch in _PUNCT_CHARS or unicodedata.category(ch)[0] == "P":
        return "P"
    if ch.isdigit():
        return "D"
    if ch.isalpha():
        return "A"
    return "O"


_ASCII_KIND = tuple(_unicode_kind(chr(o)) for o in range(128))


def _is_symbol_char(ch: str) -> bool:
    return (_ASCII_KIND[ord(ch)] if ord(ch) < 128 else _unicode_kind(ch)) == "S"


def _is_punct_char(ch: str) -> bool:
    return (_ASCII_KIND[ord(ch)] if ord(ch) < 128 else _unicode_kind(ch)) == "P"


@lru_cache(maxsize=1 << 20)
def classify_token(token: str) -> TokenClass:
    """Assign exactly one TokenClass to a whitespace-delimited token.

    Order of tests: all-punctuation, all-symbol, digit-dominant numeral,
    low-letter-share other, capitalized non-lexicon proper noun, word.
    """
    if not token:
        raise ValueError("token must be non-empty")
    ascii_kind = _ASCII_KIND
    n = len(token)
    punct = symbol = digits = letters = stripped = 0
    for ch in token:
        o = ord(ch)
        kind = ascii_kind[o] if o < 128 else _unicode_kind(ch)
        if kind == "P":
            punct += 1
        elif kind == "S":
            symbol += 1
        else:
            stripped += 1
            if kind == "D":
                digits += 1
            elif kind == "A":
                letters += 1
    if punct == n:
        return TokenClass.PUNCTUATION
    if symbol == n:
        return TokenClass.SYMBOL
    if digits >= 1 and digits * 2 >= stripped:
        return TokenClass.NUMERAL
    if letters * 2 < n:
        return TokenClass.OTHER
    if token[0].isupper() and token.lower() not in common_words():
        return TokenClass.PROPER_NOUN
    return TokenClass.WORD


# Per-token facts fused into one memoized bitmask so the table hot loop
# probes a dict once per token: bit 0 junk (non-WORD class), bit 1
# word-like (has an ASCII letter), bit 2 stopword.
_BIT_JUNK = 1
_BIT_WORDLIKE = 2
_BIT_STOPWORD = 4

_TOKEN_BITS: dict[str, int] = {}

_LETTER_RE = re.compile(r"[A-Za-z]")


def _token_bits(token: str) -> int:
    bits = 0
    if classify_token(token) is not TokenClass.WORD:
        bits |= _BIT_JUNK
    if _LETTER_RE.search(token):
        bits |= _BIT_WORDLIKE
        stops = stopwords()
        if token in stops or (not token.islower() and token.lower() in stops):
            bits |= _BIT_STOPWORD
    if len(_TOKEN_BITS) >= (1 << 20):
        _TOKEN_BITS.clear()
    _TOKEN_BITS[token] = bits
    return bits


def dedup_table(table: RawTable) -> RawTable:
    """Drop duplicate rows, then duplicate columns (first occurrence kept).

    A column's identity is its header plus every cell; row identity is the
    full cell tuple. Original order is preserved. Idempotent.
    """
    seen_rows: set[tuple[str, ...]] = set()
    rows = []
    for row in table.rows:
        if row not in seen_rows:
            seen_rows.add(row)
            rows.append(row)

    # duplicate columns require duplicate header names; distinct headers
    # make the full column comparison unnecessary
    if len(set(table.header)) == len(table.header):
        keep = None
    else:
        columns = list(zip(table.header, *rows)) if rows else [(h,) for h in table.header]
        seen_cols: set[tuple[str, ...]] = set()
        keep = []
        for j, col in enumerate(columns):
            if col not in seen_cols:
                seen_cols.add(col)
                keep.append(j)
        if len(keep) == len(table.header):
            keep = None
    if keep is None:
        if len(rows) == len(table.rows):
            return table
        return RawTable(
            website=table.website,
            url=table.url,
            page_title=table.page_title,
            header=table.header,
            rows=tuple(rows),
            table_index=table.table_index,
        )
    header = tuple(table.header[j] for j in keep)
    new_rows = tuple(tuple(row[j] for j in keep) for row in rows)
    return RawTable(
        website=table.website,
        url=table.url,
        page_title=table.page_title,
        header=header,
        rows=new_rows,
        table_index=table.table_index,
    )


def check_min_dims(table: RawTable, cfg: TableFilterConfig) -> str | None:
    """None if the (deduped) table is big enough, else the finer reason."""
    if len(table.header) < cfg.min_unique_columns:
        return "min-columns"
    if len(table.rows) < cfg.min_unique_rows:
        return "min-rows"
    return None


def table_text(table: RawTable) -> str:
    """All header and cell text joined with single spaces."""
    parts = list(table.header)
    for row in table.rows:
        parts.extend(row)
    return " ".join(parts)


# translate table deleting every ASCII char allowed by the English heuristic
_ASCII_ALLOWED = string.ascii_letters + string.digits + string.whitespace + string.punctuation
_DELETE_ALLOWED = {ord(ch): None for ch in _ASCII_ALLOWED}

_ENGLISH_MIN_TOKENS_FOR_STOPWORDS = 20


def _passes_charset(text: str, cfg: TableFilterConfig) -> bool:
    # quotient comparisons: IEEE division is correctly rounded, so exact
    # rational boundaries (e.g. 2 junk in 10 tokens vs 0.20) compare equal
    if not text:
        return True
    allowed = len(text) - len(text.translate(_DELETE_ALLOWED))
    return allowed / len(text) >= cfg.english_min_charset_fraction


def _passes_stopword_rate(wordlike: int, stopword_hits: int, cfg: TableFilterConfig) -> bool:
    if wordlike < _ENGLISH_MIN_TOKENS_FOR_STOPWORDS:
        return True
    return stopword_hits / wordlike >= cfg.english_min_stopword_rate


def is_english_text(text: str, cfg: TableFilterConfig | None = None) -> bool:
    """Charset-plus-stopword English heuristic.

    True iff at least ``english_min_charset_fraction`` of characters are
    ASCII letters, digits, whitespace, or punctuation, and, when the text
    has 20+ word-like tokens (tokens containing an ASCII letter), at
    least ``english_min_stopword_rate`` of those appear in the bundled
    stopword list. Texts below 20 word-like tokens pass on the charset
    test alone, so purely numeric content flows on to the junk filter
    instead of being charged as non-English. Empty text passes vacuously.
    """
    cfg = cfg or TableFilterConfig()
    if not _passes_charset(text, cfg):
        return False
    bits = _TOKEN_BITS
    wordlike = hits = 0
    # distinct-token loop weighted by count: C-level counting, one memo
    # probe per distinct token
    for t, n in Counter(text.split()).items():
        b = bits.get(t)
        if b is None:
            b = _token_bits(t)
        if b & _BIT_WORDLIKE:
            wordlike += n
            if b & _BIT_STOPWORD:
                hits += n
    return _passes_stopword_rate(wordlike, hits, cfg)


def junk_token_fraction(
    table: RawTable,
    classify: Callable[[str], TokenClass] = classify_token,
) -> float:
    """Fraction of non-WORD tokens across all header and cell text."""
    tokens = table_text(table).split()
    if not tokens:
        raise ValueError("table has no tokens; reject upstream as empty")
    if classify is classify_token:
        bits = _TOKEN_BITS
        junk = 0
        for t in tokens:
            b = bits.get(t)
            if b is None:
                b = _token_bits(t)
            junk += b & _BIT_JUNK
    else:
        junk = sum(1 for t in tokens if classify(t) is not TokenClass.WORD)
    return junk / len(tokens)


@dataclass(frozen=True, slots=True)
class TableVerdict:
    """Outcome of the table cascade: the deduped table or a stage name."""

    table: RawTable | None
    rejected_at: str | None
    reason: str | None = None


def filter_table(
    table: RawTable,
    cfg: TableFilterConfig | None = None,
    classify: Callable[[str], TokenClass] = classify_token,
) -> TableVerdict:
    """Run the cascade in fixed order; at most one stage is charged.

    Both dimension failures charge the single "min-rows" stage (the
    combined line the report shape expects); the finer reason rides along.
    Tables with no tokens at all are charged to "junk-tokens" with reason
    "empty-table".
    """
    cfg = cfg or TableFilterConfig()
    table = dedup_table(table)
    dim_reason = check_min_dims(table, cfg)
    if dim_reason is not None:
        return TableVerdict(None, STAGE_MIN_ROWS, dim_reason)
    text = table_text(table)
    tokens = text.split()
    if not _passes_charset(text, cfg):
        return TableVerdict(None, STAGE_NON_ENGLISH, "non-english")
    if classify is classify_token:
        # fused pass over distinct tokens weighted by count: english
        # counters and the junk tally from one memo probe each
        bits = _TOKEN_BITS
        wordlike = hits = junk = 0
        for t, n in Counter(tokens).items():
            b = bits.get(t)
            if b is None:
                b = _token_bits(t)
            if b & _BIT_JUNK:
                junk += n
            if b & _BIT_WORDLIKE:
                wordlike += n
                if b & _BIT_STOPWORD:
                    hits += n
        if not _passes_stopword_rate(wordlike, hits, cfg):
            return TableVerdict(None, STAGE_NON_ENGLISH, "non-english")
    else:
        if not is_english_text(text, cfg):
            return TableVerdict(None, STAGE_NON_ENGLISH, "non-english")
        junk = sum(1 for t in tokens if classify(t) is not TokenClass.WORD)
    if not tokens:
        return TableVerdict(None, STAGE_JUNK_TOKENS, "empty-table")
    # inclusive threshold: a table exactly at the junk bound is rejected
    if junk / len(tokens) >= cfg.max_junk_fraction:
        return TableVerdict(None, STAGE_JUNK_TOKENS, "junk-tokens")
    return TableVerdict(table, None)
