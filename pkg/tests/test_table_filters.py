"""Table cascade: dedup, dimensions, token classes, junk fraction, English."""

from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from tablefew.lexicons import common_words, stopwords
from tablefew.table_filters import (
    TableFilterConfig,
    TokenClass,
    check_min_dims,
    classify_token,
    dedup_table,
    filter_table,
    is_english_text,
    junk_token_fraction,
    table_text,
)

from conftest import make_table

CFG = TableFilterConfig()

# ten lexicon words used to build clean English tables
WORDS = ["the", "water", "light", "house", "animal", "paper", "music", "road", "stone", "garden"]


def english_table(n_rows: int = 10, n_cols: int = 3):
    header = [WORDS[c] for c in range(n_cols)]
    rows = [
        [f"{WORDS[(r + c) % len(WORDS)]} {WORDS[(r + c + 1) % len(WORDS)]} {r}x" for c in range(n_cols)]
        for r in range(n_rows)
    ]
    # suffix rXx keeps rows distinct without adding junk-classified tokens:
    # tokens like "0x" are <50% digits after stripping, letters 50% -> not junk?
    # simpler: drop it and make distinct via word rotation + row number word
    rows = [
        [f"{WORDS[(r + c) % len(WORDS)]} {WORDS[(r * 3 + c) % len(WORDS)]}" for c in range(n_cols)]
        for r in range(n_rows)
    ]
    # ensure distinct rows even when the rotation collides
    for r, row in enumerate(rows):
        row[0] = f"{row[0]} {WORDS[r % len(WORDS)]}"
    return make_table(header, rows)


class TestLexicons:
    def test_sizes(self):
        assert len(common_words()) == 1000
        assert len(stopwords()) == 50

    def test_spec_membership(self):
        assert "the" in common_words()
        assert "odor" not in common_words()  # "Odor" must classify proper noun


class TestClassifyToken:
    @pytest.mark.parametrize(
        "token,expected",
        [
            ("12.99", TokenClass.NUMERAL),
            ("1,234", TokenClass.NUMERAL),
            ("3rd", TokenClass.NUMERAL),  # 1 digit of 3 chars, >=50% after strip? "3rd" -> digits 1/3 -> WORD side
            ("---", TokenClass.PUNCTUATION),
            ("...", TokenClass.PUNCTUATION),
            ("$", TokenClass.SYMBOL),
            ("%", TokenClass.SYMBOL),
            ("@#", TokenClass.SYMBOL),
            ("the", TokenClass.WORD),
            ("Water", TokenClass.WORD),  # capitalized but in lexicon
            ("Odor", TokenClass.PROPER_NOUN),
            ("Einstein", TokenClass.PROPER_NOUN),
            ("x1y2z3", TokenClass.NUMERAL),  # 3 digits of 6 -> numeral
            ("a+b=c", TokenClass.OTHER),  # 3 letters of 5 chars but 60%... see below
        ],
    )
    def test_cases(self, token, expected):
        if token == "3rd":
            # 1 digit out of 3 remaining chars -> below the 50% digit bar,
            # 2 of 3 chars are letters -> not OTHER, lowercase -> WORD
            assert classify_token(token) is TokenClass.WORD
        elif token == "a+b=c":
            # letters 3/5 = 60% >= 50% -> not OTHER; lowercase, not in
            # lexicon -> WORD
            assert classify_token(token) is TokenClass.WORD
        else:
            assert classify_token(token) is expected

    def test_empty_token_rejected(self):
        with pytest.raises(ValueError):
            classify_token("")

    @given(st.text(min_size=1, max_size=12))
    @settings(max_examples=300, deadline=None)
    def test_total_and_deterministic(self, token):
        token = "".join(token.split())
        if not token:
            return
        first = classify_token(token)
        assert first is classify_token(token)
        assert isinstance(first, TokenClass)


class TestDedup:
    def test_duplicate_rows_dropped_order_preserved(self):
        base = english_table(6, 2)
        rows = list(base.rows)
        rows = rows[:3] + [rows[0]] + rows[3:] + [rows[0]]
        table = make_table(list(base.header), [list(r) for r in rows])
        deduped = dedup_table(table)
        assert len(deduped.rows) == 6
        assert deduped.rows == base.rows

    def test_duplicate_columns_dropped(self):
        table = make_table(
            ["price", "price", "name"],
            [["1", "1", "a"], ["2", "2", "b"]],
        )
        deduped = dedup_table(table)
        assert deduped.header == ("price", "name")
        assert deduped.rows == (("1", "a"), ("2", "b"))

    def test_same_header_different_cells_kept(self):
        table = make_table(
            ["price", "price"],
            [["1", "9"], ["2", "8"]],
        )
        assert dedup_table(table).header == ("price", "price")

    def test_unique_table_unchanged(self):
        table = english_table(8, 3)
        assert dedup_table(table) is table

    @given(st.integers(2, 8), st.integers(2, 5), st.randoms(use_true_random=False))
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, n_rows, n_cols, rnd):
        header = [f"h{c}" for c in range(n_cols)]
        rows = [
            [str(rnd.randrange(3)) for _ in range(n_cols)] for _ in range(n_rows)
        ]
        table = make_table(header, rows)
        once = dedup_table(table)
        assert dedup_table(once) == once


class TestMinDims:
    def test_boundary_2x6_accepted(self):
        table = make_table(["a", "b"], [[f"x{i}", f"y{i}"] for i in range(6)])
        assert check_min_dims(table, CFG) is None

    def test_single_column_rejected(self):
        table = make_table(["a"], [[f"x{i}"] for i in range(100)])
        assert check_min_dims(table, CFG) == "min-columns"

    def test_five_rows_rejected(self):
        table = make_table(
            ["a", "b", "c"], [[f"x{i}", f"y{i}", f"z{i}"] for i in range(5)]
        )
        assert check_min_dims(table, CFG) == "min-rows"


class TestJunkFraction:
    def test_all_common_words_zero(self):
        assert junk_token_fraction(english_table()) == 0.0

    def test_all_numbers_one(self):
        table = make_table(
            ["1", "2", "3"], [[str(i), str(i * 2), str(i * 3)] for i in range(8)]
        )
        assert junk_token_fraction(table) == 1.0

    def test_boundary_two_in_ten_rejected(self):
        # 8 WORD + 2 NUMERAL tokens = 0.2 exactly; >= threshold rejects
        table = make_table(
            ["the water", "light"],
            [["animal paper", "music"], ["12 99", "road stone"]],
        )
        tokens = table_text(table).split()
        assert len(tokens) == 10
        assert junk_token_fraction(table) == 0.2
        verdict = filter_table(table, TableFilterConfig(min_unique_rows=2))
        assert verdict.rejected_at == "junk-tokens"

    def test_monotone_in_appended_tokens(self):
        table = english_table(6, 2)
        base = junk_token_fraction(table)
        rows = [list(r) for r in table.rows]
        rows[0][0] += " water"  # appending a WORD never increases
        lower = junk_token_fraction(make_table(list(table.header), rows))
        assert lower <= base
        rows[0][0] += " 4711"  # appending a non-WORD never decreases
        higher = junk_token_fraction(make_table(list(table.header), rows))
        assert higher >= lower

    def test_empty_table_errors(self):
        table = make_table(["", ""], [["", ""]] * 2)
        with pytest.raises(ValueError):
            junk_token_fraction(table)


class TestEnglish:
    def test_pangram_true(self):
        assert is_english_text("The quick brown fox jumps over the lazy dog", CFG)

    def test_cjk_false(self):
        assert not is_english_text("这是一个完全不是英语的表格内容示例," * 3, CFG)

    def test_consonant_soup_false(self):
        # 30 ASCII tokens, zero stopwords -> rate 0.0 < 0.05
        text = " ".join(f"zzxqv{i}krt" for i in range(30))
        assert not is_english_text(text, CFG)

    def test_short_text_passes_on_charset_alone(self):
        assert is_english_text("zzxqv krt wqpl", CFG)  # 3 tokens, no stopwords

    def test_stopword_rate_boundary_inclusive(self):
        # exactly 1 stopword in 20 tokens = 0.05 -> kept
        tokens = ["the"] + [f"word{i}" for i in range(19)]
        assert is_english_text(" ".join(tokens), CFG)

    def test_numeric_text_not_charged_as_non_english(self):
        # no word-like tokens: numeric junk must reach the junk filter
        assert is_english_text(" ".join(str(i) for i in range(40)), CFG)


class TestFilterTable:
    def test_clean_table_accepted(self):
        verdict = filter_table(english_table(10, 3), CFG)
        assert verdict.rejected_at is None
        assert verdict.table is not None

    def test_small_table_rejected_min_rows(self):
        table = make_table(["a", "b"], [[f"x{i}", f"y{i}"] for i in range(4)])
        verdict = filter_table(table, CFG)
        assert verdict.rejected_at == "min-rows"

    def test_numeric_table_rejected_junk(self):
        table = make_table(
            ["1", "2", "3"], [[str(i), str(i + 1), str(i + 2)] for i in range(10)]
        )
        verdict = filter_table(table, CFG)
        assert verdict.rejected_at == "junk-tokens"

    def test_cjk_table_rejected_non_english(self):
        table = make_table(
            ["表头一", "表头二"], [[f"数据内容{i}", f"更多数据{i}"] for i in range(8)]
        )
        verdict = filter_table(table, CFG)
        assert verdict.rejected_at == "non-english"

    def test_dedup_applied_before_dims(self):
        # 8 rows but only 4 unique -> min-rows
        rows = [[f"x{i % 4}", f"y{i % 4}"] for i in range(8)]
        verdict = filter_table(make_table(["a", "b"], rows), CFG)
        assert verdict.rejected_at == "min-rows"

    def test_first_failure_wins_single_stage(self):
        # both too small and non-english: charged to min-rows only
        table = make_table(["表", "头"], [["一", "二"]])
        verdict = filter_table(table, CFG)
        assert verdict.rejected_at == "min-rows"

    def test_zero_token_table_charged_junk(self):
        # distinct whitespace-only cells survive dedup and the size check
        # but produce no tokens at all; charged to junk-tokens
        ws = ["", " ", "  ", "   ", "    ", "     "]
        table = make_table(["", " "], [[ws[i], ws[(i + 1) % 6]] for i in range(6)])
        verdict = filter_table(table, CFG)
        assert verdict.rejected_at == "junk-tokens"
        assert verdict.reason == "empty-table"
