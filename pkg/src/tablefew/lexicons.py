"""Bundled lexicon files backing the token classifier and English heuristic.

Format: one token per line, UTF-8, sorted; lines starting with '#' are
comments. The file contents are versioned fixtures; changing them changes
golden outputs.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

COMMON_WORDS_FILE = "common_words.txt"
STOPWORDS_FILE = "stopwords.txt"


def _read_lexicon(name: str) -> frozenset[str]:
    text = resources.files("tablefew.data").joinpath(name).read_text("utf-8")
    words = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return frozenset(words)


@lru_cache(maxsize=None)
def common_words() -> frozenset[str]:
    """The 1000-entry common-word list (lower-case)."""
    return _read_lexicon(COMMON_WORDS_FILE)


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    """The 50-entry English stopword list (lower-case)."""
    return _read_lexicon(STOPWORDS_FILE)
