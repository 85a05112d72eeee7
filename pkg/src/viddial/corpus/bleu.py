"""Sentence-level BLEU-4 used to find echoed responses."""
import math
from collections import Counter

from viddial.errors import ContractError


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def compute_bleu4(hyp, ref, smoothing="add-one"):
    """BLEU with modified n-gram precisions for n = 1..4 and brevity penalty.

    ``smoothing="add-one"`` adds one to numerator and denominator of every
    precision; ``"none"`` leaves them raw, so any zero precision gives 0.
    """
    if not hyp or not ref:
        raise ContractError("BLEU needs non-empty hypothesis and reference")
    log_sum = 0.0
    for n in range(1, 5):
        hyp_counts = ngrams(hyp, n)
        ref_counts = ngrams(ref, n)
        matched = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        total = sum(hyp_counts.values())
        if smoothing == "add-one":
            matched, total = matched + 1, total + 1
        elif smoothing != "none":
            raise ContractError(f"unknown smoothing {smoothing!r}")
        if matched == 0 or total == 0:
            return 0.0
        log_sum += math.log(matched / total)
    bp = 1.0 if len(hyp) >= len(ref) else math.exp(1.0 - len(ref) / len(hyp))
    return bp * math.exp(log_sum / 4.0)
