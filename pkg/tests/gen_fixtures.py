"""Generate the bundled synthetic corpus and freeze golden outputs.

Run manually from the repo root after intentional pipeline changes:

    python tests/gen_fixtures.py

The corpus is 200 well-formed WDC-format table records (plus a handful of
malformed lines) covering every reject stage of both cascades, all derived
from a fixed seed. Golden files are the outputs of one reference build and
are committed; the acceptance suite re-runs the build and compares bytes.

Cell text leans on stopword-rich templates so that genuinely clean tables
clear the charset/stopword English heuristic and the junk-token filter the
way real prose does; reject batches break exactly one rule each.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"

WORDS = [
    "water", "light", "house", "animal", "paper", "music", "road",
    "stone", "garden", "river", "mountain", "window", "bridge", "field",
    "winter", "summer", "morning", "evening", "forest", "island", "village",
    "market", "castle", "harbor", "meadow", "valley", "orchard", "library",
]

SITES = [
    "recipes.example.com",
    "howto.example.org",
    "catalog.example.net",
    "guides.example.io",
    "flashcards.example.edu",
    "manuals.example.dev",
    "tables.example.co",
    "lists.example.info",
]

FLOOD_SITE = "flood.shopcatalog.example"


class Phrases:
    """Deterministic distinct English phrases with a healthy stopword rate."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used: set[str] = set()

    def fresh(self, template: str) -> str:
        for _ in range(1000):
            words = [self.rng.choice(WORDS) for _ in range(template.count("{}"))]
            text = template.format(*words)
            if text not in self.used:
                self.used.add(text)
                return text
        raise RuntimeError("phrase space exhausted")

    def input_cell(self) -> str:
        return self.fresh("the {} by the {} of {}")

    def output_cell(self) -> str:
        return self.fresh("the {} with {}")


def wdc(relation, url, title="synthetic page", has_header=True, header_pos=0, orientation="HORIZONTAL"):
    return json.dumps(
        {
            "relation": relation,
            "url": url,
            "pageTitle": title,
            "hasHeader": has_header,
            "headerPosition": header_pos,
            "tableOrientation": orientation,
        },
        ensure_ascii=False,
    )


def english_relation(phrases: Phrases, n_cols: int, n_rows: int, outputs=None):
    """Column-major relation, header at row 0, distinct stopword-rich rows."""
    rng = phrases.rng
    header = [f"{rng.choice(WORDS)} {c_name}" for c_name in ("alpha", "beta", "gamma", "delta")[:n_cols]]
    grid = []
    for r in range(n_rows):
        row = [phrases.input_cell() for _ in range(n_cols)]
        if outputs is not None:
            row[-1] = outputs[r]
        grid.append(row)
    return [[header[c]] + [grid[r][c] for r in range(n_rows)] for c in range(n_cols)]


def corpus_lines() -> list[str]:
    rng = random.Random(20220701)
    phrases = Phrases(rng)
    lines: list[str] = []
    site_page = {s: 0 for s in SITES + [FLOOD_SITE]}

    def url_for(site: str) -> str:
        site_page[site] += 1
        return f"https://{site}/page-{site_page[site]}"

    # 1. clean survivors: balanced outputs, 2-4 columns, 7-12 rows (36 tables)
    for i in range(36):
        site = SITES[i % len(SITES)]
        n_rows = 7 + (i % 6)
        n_cols = 2 + (i % 3)
        outputs = [phrases.output_cell() for _ in range(n_rows)]
        lines.append(wdc(english_relation(phrases, n_cols, n_rows, outputs), url_for(site)))

    # 1b. sparse outputs: 3 of 8 cells empty drops both candidates below
    # the 6-example floor -> task-scope min-rows (5 tables)
    for i in range(5):
        site = SITES[(i + 2) % len(SITES)]
        outputs = [phrases.output_cell() if r % 3 else "" for r in range(8)]
        lines.append(wdc(english_relation(phrases, 2, 8, outputs), url_for(site)))

    # 2. flood site to exercise the per-website cap (20 tables x 2 cols)
    for i in range(20):
        outputs = [phrases.output_cell() for _ in range(7)]
        lines.append(
            wdc(english_relation(phrases, 2, 7, outputs), url_for(FLOOD_SITE))
        )

    # 3. vertical-orientation clean tables (10)
    for i in range(10):
        site = SITES[(i + 3) % len(SITES)]
        header = [f"{rng.choice(WORDS)} question", f"{rng.choice(WORDS)} answer"]
        grid = [header] + [
            [phrases.input_cell(), phrases.output_cell()] for _ in range(8)
        ]
        # vertical storage: the stored relation is already the row-wise grid
        lines.append(wdc(grid, url_for(site), orientation="VERTICAL"))

    # 4. min-rows rejects: tiny tables and single columns (24)
    for i in range(24):
        site = SITES[i % len(SITES)]
        if i % 3 == 0:
            relation = english_relation(phrases, 1, 9)  # one column
        elif i % 3 == 1:
            relation = english_relation(phrases, 3, 3)  # three rows
        else:
            # nine raw rows that dedup to three
            cols = english_relation(phrases, 2, 3)
            relation = [col[:1] + col[1:] * 3 for col in cols]
        lines.append(wdc(relation, url_for(site)))

    # 5. non-english rejects (20): CJK tables and consonant soup
    for i in range(20):
        site = SITES[(i + 1) % len(SITES)]
        if i % 2 == 0:
            relation = [
                [f"表头{c}"] + [f"数据内容第{r}行第{c}列" for r in range(8)]
                for c in range(2)
            ]
        else:
            relation = [
                [f"hdr{c} one"] + [f"zxqv{r}krtp wqjfl{c}mns gvrtk hshpw" for r in range(10)]
                for c in range(2)
            ]
        lines.append(wdc(relation, url_for(site)))

    # 6. junk-token rejects (20): numeric and symbol-heavy tables
    for i in range(20):
        site = SITES[(i + 2) % len(SITES)]
        if i % 2 == 0:
            relation = [
                [f"col {c}"] + [f"{r * 37 + c}.{c}{r}" for r in range(9)]
                for c in range(3)
            ]
        else:
            relation = [
                [f"col {c}"] + [f"$ {r}% #{c} {r + c}" for r in range(8)]
                for c in range(2)
            ]
        lines.append(wdc(relation, url_for(site)))

    # 7. ingest rejects: no-header (15), bad header index (5), bad url (5)
    for i in range(15):
        lines.append(
            wdc(english_relation(phrases, 2, 8), url_for(SITES[i % len(SITES)]), has_header=False)
        )
    for i in range(5):
        lines.append(
            wdc(english_relation(phrases, 2, 8), url_for(SITES[i % len(SITES)]), header_pos=40)
        )
    for i in range(5):
        lines.append(wdc(english_relation(phrases, 2, 8), url="not-a-url"))

    # 8. task-stage material (40 tables)
    for i in range(10):  # one-to-many: repeated input column, distinct outputs
        site = SITES[i % len(SITES)]
        header = ["prompt text", "response text"]
        left = [phrases.input_cell() for _ in range(4)]
        grid = [[left[r % 4], phrases.output_cell()] for r in range(8)]
        columns = [[header[c]] + [grid[r][c] for r in range(8)] for c in range(2)]
        lines.append(wdc(columns, url_for(site)))
    for i in range(10):  # min-classes: constant output column
        site = SITES[(i + 4) % len(SITES)]
        header = ["question words", "label"]
        grid = [[phrases.input_cell(), "the same label"] for _ in range(7)]
        columns = [[header[c]] + [grid[r][c] for r in range(7)] for c in range(2)]
        lines.append(wdc(columns, url_for(site)))
    for i in range(10):  # class-balance: outputs a*6 b c  (evenness 0.6696)
        site = SITES[(i + 5) % len(SITES)]
        outputs = ["the usual answer"] * 6 + ["the rare answer", "the other answer"]
        lines.append(wdc(english_relation(phrases, 2, 8, outputs), url_for(site)))
    for i in range(10):  # non-english-output: CJK target column, English input
        site = SITES[(i + 6) % len(SITES)]
        header = ["the long description", "name"]
        grid = [[phrases.input_cell() + " " + phrases.input_cell(), f"条目{r}"] for r in range(7)]
        columns = [[header[c]] + [grid[r][c] for r in range(7)] for c in range(2)]
        lines.append(wdc(columns, url_for(site)))

    assert len(lines) == 200, len(lines)

    # malformed lines: counted in the error log, never in the table report
    lines.insert(37, "{ this is not json")
    lines.insert(90, json.dumps({"relation": [["a", "b"], ["c"]], "url": "https://x.example/p", "pageTitle": "", "hasHeader": True, "headerPosition": 0, "tableOrientation": "HORIZONTAL"}))
    lines.insert(151, json.dumps(["not", "an", "object"]))
    lines.append("")
    return lines


BUILD_CONFIG = {
    "table": {
        "min_unique_columns": 2,
        "min_unique_rows": 6,
        "max_junk_fraction": 0.20,
        "english_min_charset_fraction": 0.70,
        "english_min_stopword_rate": 0.05,
    },
    "task": {
        "max_tasks_per_website": 24,
        "min_examples": 6,
        "min_output_classes": 2,
        "min_evenness": 0.7,
        "cap_seed": 20220701,
    },
}


def main() -> None:
    from tablefew.pipeline import build_files, load_config

    FIXTURES.mkdir(exist_ok=True)
    corpus = FIXTURES / "corpus200.jsonl"
    corpus.write_text("\n".join(corpus_lines()) + "\n", "utf-8")
    config_path = FIXTURES / "build_config.json"
    config_path.write_text(json.dumps(BUILD_CONFIG, indent=2) + "\n", "utf-8")

    cfg = load_config(BUILD_CONFIG)
    result = build_files(
        input_path=corpus,
        fmt="wdc",
        output_path=FIXTURES / "golden_tasks.jsonl",
        report_path=FIXTURES / "golden_report.json",
        cfg=cfg,
        jobs=1,
    )
    # the manifest lands next to the output file
    print("tables:", result.tables_report.to_dict())
    print("tasks:", result.tasks_report.to_dict())
    print("input errors:", len(result.input_errors))


if __name__ == "__main__":
    main()
