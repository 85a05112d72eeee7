"""10-way retrieval protocol and recall@k."""
import json
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

from viddial.errors import ContractError
from viddial.models.negatives import build_eval_lists

KS = (1, 2, 5)


@dataclass
class RankedCandidateList:
    instance_id: str
    positive_index: int
    candidates: List[List[str]]
    scores: List[float]
    seed: int = 0

    def __post_init__(self):
        if len(self.candidates) != len(self.scores):
            raise ContractError("candidates and scores differ in length")
        if not 0 <= self.positive_index < len(self.candidates):
            raise ContractError("positive_index out of range")

    def rank_of_positive(self):
        """1-based rank under descending score; ties go to the lower index."""
        s = self.scores
        p = self.positive_index
        sp = s[p]
        ahead = sum(1 for i, x in enumerate(s) if x > sp or (x == sp and i < p))
        return ahead + 1

    def ranking(self):
        return sorted(range(len(self.scores)), key=lambda i: (-self.scores[i], i))


def recall_at_k(lst: RankedCandidateList, k):
    return 1 if lst.rank_of_positive() <= k else 0


def model_scorer(model):
    """Adapt a model with ``score_candidates(ex, ids)`` to the scorer protocol."""

    def score(ex, candidates):
        return model.score_candidates(ex, [c.response_ids for c in candidates])

    return score


def oracle_scorer(ex, candidates):
    return [1.0 if c is ex else 0.0 for c in candidates]


def constant_scorer(ex, candidates):
    return [0.0] * len(candidates)


@dataclass
class RetrievalReport:
    recall: Dict[int, float]
    lists: List[RankedCandidateList] = field(default_factory=list)
    records: List[dict] = field(default_factory=list)

    def as_dict(self):
        return {f"r@{k}": v for k, v in self.recall.items()}


def evaluate_retrieval(scorer: Callable, examples: Sequence, seed=0, lists=None, ks=KS):
    """Score seeded 10-candidate lists and average recall@k.

    ``scorer(context_example, candidate_examples) -> scores``; each candidate
    contributes its response. Per-instance records are kept for significance
    testing.
    """
    if hasattr(scorer, "score_candidates"):
        scorer = model_scorer(scorer)
    lists = lists if lists is not None else build_eval_lists(examples, seed)
    ranked, records = [], []
    totals = {k: 0 for k in ks}
    for cl in lists:
        ex = examples[cl.instance]
        cands = [examples[i] for i in cl.sources]
        scores = [float(s) for s in scorer(ex, cands)]
        rl = RankedCandidateList(ex.instance_id, cl.positive_index, [c.response_tokens for c in cands], scores, seed)
        ranked.append(rl)
        rec = {"instance_id": ex.instance_id, "seed": seed, "scores": scores, "positive_index": cl.positive_index}
        for k in ks:
            hit = recall_at_k(rl, k)
            rec[f"r{k}"] = hit
            totals[k] += hit
        records.append(rec)
    n = max(len(lists), 1)
    return RetrievalReport({k: totals[k] / n for k in ks}, ranked, records)


def write_records(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
