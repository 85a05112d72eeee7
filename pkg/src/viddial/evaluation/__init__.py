"""Retrieval recall@k, phrase metrics and significance testing."""
from viddial.evaluation.metrics import lcs_length, meteor_lite, rouge_l, stem
from viddial.evaluation.retrieval import (
    RankedCandidateList,
    RetrievalReport,
    constant_scorer,
    evaluate_retrieval,
    model_scorer,
    oracle_scorer,
    recall_at_k,
    write_records,
)
from viddial.evaluation.significance import bootstrap_significance

__all__ = [
    "RankedCandidateList", "RetrievalReport", "bootstrap_significance", "constant_scorer",
    "evaluate_retrieval", "lcs_length", "meteor_lite", "model_scorer", "oracle_scorer",
    "recall_at_k", "rouge_l", "stem", "write_records",
]
