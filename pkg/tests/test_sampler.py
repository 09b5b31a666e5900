"""Sampling determinism, shapes, and order independence."""

from __future__ import annotations

import json
import random

import pytest

from tablefew.model import SamplePlan, encode_task
from tablefew.sampler import (
    load_assignments,
    sample_tasks,
    stratified_sample,
    stratum_file_name,
    unique_per_website,
)

from conftest import make_task


def task_pool(n_tasks: int, n_sites: int = 7, examples: int = 12, seed: int = 1):
    rng = random.Random(seed)
    tasks = []
    for i in range(n_tasks):
        site = f"site{rng.randrange(n_sites)}.example.com"
        outputs = [f"answer {j}" for j in range(examples)]
        tasks.append(
            make_task(outputs, website=site, url=f"https://{site}/p{i}", column=1)
        )
    return tasks


class TestSampleTasks:
    def test_shape_m_and_n(self):
        tasks = task_pool(500, examples=15)
        plan = SamplePlan(seed=42, max_tasks=100, max_examples_per_task=10)
        out = sample_tasks(tasks, plan)
        assert len(out) == 100
        assert all(len(t.examples) <= 10 for t in out)

    def test_byte_identical_reruns(self):
        tasks = task_pool(300)
        plan = SamplePlan(seed=7, max_tasks=50, max_examples_per_task=8)
        a = [encode_task(t) for t in sample_tasks(tasks, plan)]
        b = [encode_task(t) for t in sample_tasks(tasks, plan)]
        assert a == b

    def test_input_permutation_invariance(self):
        tasks = task_pool(300)
        plan = SamplePlan(seed=7, max_tasks=50, max_examples_per_task=8)
        shuffled = list(tasks)
        random.Random(0).shuffle(shuffled)
        a = [encode_task(t) for t in sample_tasks(tasks, plan)]
        b = [encode_task(t) for t in sample_tasks(shuffled, plan)]
        assert a == b

    def test_output_sorted_by_task_id(self):
        out = sample_tasks(task_pool(100), SamplePlan(seed=3, max_tasks=30))
        ids = [t.task_id for t in out]
        assert ids == sorted(ids)

    def test_subset_without_replacement(self):
        tasks = task_pool(100)
        out = sample_tasks(tasks, SamplePlan(seed=3, max_tasks=40))
        in_ids = {t.task_id for t in tasks}
        out_ids = [t.task_id for t in out]
        assert len(out_ids) == len(set(out_ids)) == 40
        assert set(out_ids) <= in_ids

    def test_m_larger_than_pool_takes_all_with_warning(self):
        tasks = task_pool(3)
        with pytest.warns(UserWarning, match="taking all"):
            out = sample_tasks(tasks, SamplePlan(seed=1, max_tasks=10))
        assert {t.task_id for t in out} == {t.task_id for t in tasks}

    def test_n_below_two_rejected(self):
        with pytest.raises(ValueError):
            SamplePlan(seed=1, max_tasks=5, max_examples_per_task=1)

    def test_example_subset_preserves_relative_order(self):
        tasks = task_pool(20, examples=12)
        out = sample_tasks(tasks, SamplePlan(seed=9, max_tasks=20, max_examples_per_task=5))
        for task in out:
            originals = next(t for t in tasks if t.task_id == task.task_id).examples
            positions = [originals.index(ex) for ex in task.examples]
            assert positions == sorted(positions)

    def test_different_seed_different_selection(self):
        tasks = task_pool(300)
        a = sample_tasks(tasks, SamplePlan(seed=1, max_tasks=50))
        b = sample_tasks(tasks, SamplePlan(seed=2, max_tasks=50))
        assert {t.task_id for t in a} != {t.task_id for t in b}


class TestUniquePerWebsite:
    def test_one_per_site(self):
        tasks = task_pool(100, n_sites=7)
        out = unique_per_website(tasks, seed=5)
        assert len(out) == len({t.website for t in tasks})
        assert len({t.website for t in out}) == len(out)

    def test_idempotent(self):
        tasks = task_pool(100, n_sites=7)
        once = unique_per_website(tasks, seed=5)
        again = unique_per_website(once, seed=5)
        assert [t.task_id for t in once] == [t.task_id for t in again]

    def test_site_count_matches_distinct_input_sites(self):
        # set-level property from the paper-scale accounting: output site
        # count equals the distinct website count of the input
        tasks = task_pool(5000, n_sites=237)
        out = unique_per_website(tasks, seed=0)
        assert len(out) == len({t.website for t in tasks})


class TestStratified:
    def test_quality_strata_files(self, tmp_path):
        tasks = task_pool(120)
        labels = {t.task_id: str(i % 3) for i, t in enumerate(tasks)}
        path = tmp_path / "labels.jsonl"
        with open(path, "w") as fh:
            for tid, label in labels.items():
                fh.write(json.dumps({"task_id": tid, "label": label}) + "\n")
        assignments = load_assignments(path)
        with pytest.warns(UserWarning):  # strata smaller than 200: takes all
            groups = stratified_sample(tasks, "quality", assignments, 200, seed=1)
        assert set(groups) == {"0", "1", "2"}
        assert all(len(v) <= 200 for v in groups.values())

    def test_per_stratum_cap_applied(self):
        tasks = task_pool(90, n_sites=3)
        groups = stratified_sample(tasks, "website", None, 10, seed=1)
        assert all(len(v) == 10 for v in groups.values())

    def test_website_stratum_single_site(self):
        tasks = task_pool(60, n_sites=5)
        site = tasks[0].website
        with pytest.warns(UserWarning):  # stratum smaller than 1000: takes all
            groups = stratified_sample(
                tasks, "website", None, 1000, seed=1, strata=[site]
            )
        assert set(groups) == {site}
        assert all(t.website == site for t in groups[site])

    def test_missing_stratum_errors(self):
        tasks = task_pool(20, n_sites=2)
        with pytest.raises(ValueError, match="missing.example.com"):
            stratified_sample(
                tasks, "website", None, 5, seed=1, strata=["missing.example.com"]
            )

    def test_oversized_request_takes_all_with_warning(self):
        tasks = task_pool(10, n_sites=1)
        site = tasks[0].website
        with pytest.warns(UserWarning, match="taking all"):
            groups = stratified_sample(tasks, "website", None, 50, seed=1, strata=[site])
        assert len(groups[site]) == len({t.task_id for t in tasks})

    def test_unknown_assignment_ids_warn(self):
        tasks = task_pool(10)
        assignments = {t.task_id: "0" for t in tasks}
        assignments["ghost__0000000000000000__col0"] = "0"
        with pytest.warns(UserWarning, match="not present"):
            stratified_sample(tasks, "quality", assignments, 5, seed=1)

    def test_stratum_file_name(self):
        assert stratum_file_name("out/slices", "2") == "out/slices.2.jsonl"
        assert (
            stratum_file_name("s", "support.google.com") == "s.support.google.com.jsonl"
        )
        assert stratum_file_name("s", "weird/label") == "s.weird_label.jsonl"
