import json
import math
import os
import random

import numpy as np
import pytest

from conftest import toy_examples
from oracles import bootstrap_exact, lcs_oracle, rouge_l_oracle
from viddial.errors import ContractError
from viddial.evaluation import (
    RankedCandidateList,
    bootstrap_significance,
    constant_scorer,
    evaluate_retrieval,
    lcs_length,
    meteor_lite,
    oracle_scorer,
    recall_at_k,
    rouge_l,
    stem,
    write_records,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def _list(scores, positive):
    return RankedCandidateList("x", positive, [[str(i)] for i in range(len(scores))], scores)


# -- recall ---------------------------------------------------------------

def test_positive_strictly_highest():
    lst = _list([0.1] * 9 + [0.9], 9)
    assert [recall_at_k(lst, k) for k in (1, 2, 5)] == [1, 1, 1]


def test_positive_ranked_third():
    scores = [0.9, 0.8, 0.7] + [0.0] * 7
    lst = _list(scores, 2)
    assert lst.rank_of_positive() == 3
    assert [recall_at_k(lst, k) for k in (1, 2, 5)] == [0, 0, 1]


def test_ties_go_to_lower_index():
    lst = _list([0.5] * 10, 4)
    assert lst.rank_of_positive() == 5
    assert lst.ranking() == list(range(10))


def test_list_validation():
    with pytest.raises(ContractError):
        RankedCandidateList("x", 0, [["a"]], [0.1, 0.2])
    with pytest.raises(ContractError):
        _list([0.1, 0.2], 2)


def test_random_scores_give_chance_recall():
    rng = np.random.default_rng(11)
    n = 20000
    hits = {k: 0 for k in (1, 2, 5)}
    for _ in range(n):
        lst = _list(list(rng.random(10)), int(rng.integers(10)))
        for k in hits:
            hits[k] += recall_at_k(lst, k)
    for k, expected in ((1, 0.1), (2, 0.2), (5, 0.5)):
        se = math.sqrt(expected * (1 - expected) / n)
        assert abs(hits[k] / n - expected) <= 4 * se


def test_oracle_and_constant_scorers():
    exs = toy_examples(0, n=30)
    assert evaluate_retrieval(oracle_scorer, exs, seed=1).as_dict() == {"r@1": 1.0, "r@2": 1.0, "r@5": 1.0}
    # Ties rank by index, so a constant scorer hits iff the positive sits in the first k slots.
    r1 = [evaluate_retrieval(constant_scorer, exs, seed=s).recall[1] for s in range(30)]
    n = 30 * 30
    assert abs(np.mean(r1) - 0.1) <= 4 * math.sqrt(0.09 / n)


def test_records_and_monotone_recall(tmp_path):
    exs = toy_examples(1, n=12)
    rng = np.random.default_rng(0)
    report = evaluate_retrieval(lambda ex, cands: list(rng.random(len(cands))), exs, seed=2)
    for rec in report.records:
        assert rec["r1"] <= rec["r2"] <= rec["r5"]
        assert len(rec["scores"]) == 10
    assert report.recall[1] <= report.recall[2] <= report.recall[5]
    path = tmp_path / "r.jsonl"
    write_records(path, report.records)
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert set(lines[0]) == {"instance_id", "seed", "scores", "positive_index", "r1", "r2", "r5"}


# -- ROUGE-L --------------------------------------------------------------

def test_rouge_hand_case():
    p, r, beta = 1.0, 0.75, 1.2
    expected = (1 + beta ** 2) * p * r / (r + beta ** 2 * p)
    assert rouge_l("a c d".split(), ["a b c d".split()]) == pytest.approx(expected, abs=1e-15)


def test_rouge_edges():
    assert rouge_l(["a", "b"], [["a", "b"]]) == 1.0
    assert rouge_l(["a"], [["b"]]) == 0.0
    assert rouge_l([], [["b"]]) == 0.0


def test_rouge_takes_best_reference():
    refs = [["x", "y"], ["a", "b", "c"]]
    assert rouge_l(["a", "b", "c"], refs) == 1.0
    assert rouge_l(["a", "b", "c"], refs + refs) == 1.0


def test_lcs_and_rouge_agree_with_oracle_on_random_pairs():
    rng = random.Random(5)
    alphabet = "abcde"
    for _ in range(1000):
        a = [rng.choice(alphabet) for _ in range(rng.randint(0, 9))]
        b = [rng.choice(alphabet) for _ in range(rng.randint(1, 9))]
        assert lcs_length(a, b) == lcs_oracle(a, b)
        if a:
            assert rouge_l(a, [b]) == rouge_l_oracle(a, [b])


# -- METEOR-lite ----------------------------------------------------------

def test_meteor_identical_hand_value():
    # P = R = 1 and one chunk over three matches.
    assert meteor_lite("what a goal".split(), ["what a goal".split()]) == pytest.approx(1 - 0.5 / 27, abs=1e-15)


def test_meteor_no_match_and_empty():
    assert meteor_lite(["a"], [["b"]]) == 0.0
    assert meteor_lite([], [["b"]]) == 0.0


def test_meteor_stem_match_counts():
    assert stem("goals") == "goal"
    assert meteor_lite(["goals"], [["goal"]]) == meteor_lite(["goal"], [["goal"]])


def test_meteor_fragmentation_hand_value():
    # hyp "a b c", ref "c x a b": 3 matches in 2 chunks; P = 1, R = 3/4.
    p, r = 1.0, 0.75
    f = 10 * p * r / (r + 9 * p)
    expected = f * (1 - 0.5 * (2 / 3) ** 3)
    assert meteor_lite("a b c".split(), ["c x a b".split()]) == pytest.approx(expected, abs=1e-15)


def test_metrics_in_unit_interval():
    rng = random.Random(9)
    for _ in range(300):
        hyp = [rng.choice("abcd") for _ in range(rng.randint(1, 6))]
        refs = [[rng.choice("abcd") for _ in range(rng.randint(1, 6))] for _ in range(rng.randint(1, 3))]
        for metric in (rouge_l, meteor_lite):
            v = metric(hyp, refs)
            assert 0.0 <= v <= 1.0
            assert metric(hyp, refs + refs) == v


# -- bootstrap ------------------------------------------------------------

def test_bootstrap_edges():
    a = [0.1, 0.5, 0.3]
    assert bootstrap_significance(a, a, n=5000) == 1.0
    assert bootstrap_significance([1, 1, 1, 1], [0, 0, 0, 0], n=5000) == 0.0
    with pytest.raises(ContractError):
        bootstrap_significance([1, 2], [1])


def test_bootstrap_hand_case():
    # Only the first instance differs; a resample is "not better" iff it never draws it.
    p = bootstrap_significance([1, 0, 0], [0, 0, 0], n=100_000, seed=0)
    assert abs(p - 8 / 27) <= 5 * math.sqrt((8 / 27) * (19 / 27) / 100_000)


def test_bootstrap_matches_exact_enumeration():
    with open(os.path.join(FIXTURES, "bootstrap_cases.json"), encoding="utf-8") as fh:
        cases = json.load(fh)
    for case in cases:
        exact = case["p_num"] / case["p_den"]
        assert float(bootstrap_exact(case["a"], case["b"])) == exact
        p = bootstrap_significance(case["a"], case["b"], n=100_000, seed=3)
        assert abs(p - exact) <= 5 * math.sqrt(max(exact * (1 - exact), 1e-12) / 100_000) + 1e-12


def test_bootstrap_is_seeded():
    a, b = [0.3, 0.1, 0.9, 0.4], [0.2, 0.3, 0.5, 0.1]
    assert bootstrap_significance(a, b, n=3000, seed=4) == bootstrap_significance(a, b, n=3000, seed=4)
