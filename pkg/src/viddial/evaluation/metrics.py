"""Phrase-matching metrics with multiple references: ROUGE-L and METEOR-lite.

METEOR-lite aligns unigrams by exact match, then by a small suffix-stripping
stemmer; it has no synonym or paraphrase stage, so its values are not
comparable to official METEOR scores.
"""
from typing import Sequence

from viddial.numerics import kernels

_SUFFIXES = ("ingly", "edly", "ings", "ing", "ies", "ied", "ers", "est", "ed", "es", "er", "ly", "s")


def stem(token):
    for suf in _SUFFIXES:
        if token.endswith(suf) and len(token) - len(suf) >= 3:
            base = token[: -len(suf)]
            if suf in ("ies", "ied"):
                base += "y"
            return base
    return token


def _ids(a, b):
    table = {}
    return ([table.setdefault(t, len(table)) for t in a], [table.setdefault(t, len(table)) for t in b])


def lcs_length(a, b):
    ia, ib = _ids(a, b)
    return kernels.lcs_length(ia, ib)


def rouge_l_single(hyp, ref, beta=1.2):
    if not hyp or not ref:
        return 0.0
    lcs = lcs_length(hyp, ref)
    if lcs == 0:
        return 0.0
    p = lcs / len(hyp)
    r = lcs / len(ref)
    return (1 + beta ** 2) * p * r / (r + beta ** 2 * p)


def rouge_l(hyp: Sequence[str], refs, beta=1.2):
    """LCS-based F-measure, best over references."""
    if not hyp:
        return 0.0
    return max((rouge_l_single(list(hyp), list(r), beta) for r in refs), default=0.0)


def align(hyp, ref):
    """Greedy unigram alignment: exact matches first, then stem matches.

    Returns ``hyp index -> ref index``. Among several free reference
    positions the one continuing the previous alignment is preferred, then
    the leftmost.
    """
    mapping = {}
    used = set()
    for stage in ("exact", "stem"):
        key = (lambda t: t) if stage == "exact" else stem
        ref_keys = [key(t) for t in ref]
        prev = None
        for i, tok in enumerate(hyp):
            if i in mapping:
                prev = mapping[i]
                continue
            k = key(tok)
            options = [j for j, rk in enumerate(ref_keys) if rk == k and j not in used]
            if not options:
                continue
            j = prev + 1 if prev is not None and prev + 1 in options else options[0]
            mapping[i] = j
            used.add(j)
            prev = j
    return mapping


def count_chunks(mapping):
    chunks = 0
    prev_h = prev_r = None
    for h in sorted(mapping):
        r = mapping[h]
        if prev_h is None or h != prev_h + 1 or r != prev_r + 1:
            chunks += 1
        prev_h, prev_r = h, r
    return chunks


def meteor_lite_single(hyp, ref, alpha=0.9, beta=3.0, gamma=0.5):
    if not hyp or not ref:
        return 0.0
    mapping = align(hyp, ref)
    m = len(mapping)
    if m == 0:
        return 0.0
    p = m / len(hyp)
    r = m / len(ref)
    f_mean = p * r / (alpha * p + (1 - alpha) * r)
    penalty = gamma * (count_chunks(mapping) / m) ** beta
    return f_mean * (1 - penalty)


def meteor_lite(hyp: Sequence[str], refs):
    """``F_mean * (1 - 0.5 (chunks/matches)^3)`` with ``F_mean = 10PR/(R+9P)``; best over references."""
    if not hyp:
        return 0.0
    return max((meteor_lite_single(list(hyp), list(r)) for r in refs), default=0.0)
