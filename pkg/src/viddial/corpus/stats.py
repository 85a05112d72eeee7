"""Dataset statistics: lengths, context-size histogram, frequent words."""
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Tuple

from viddial.corpus.chatlog import USER_TAG


@lru_cache(maxsize=1)
def stopwords():
    text = resources.files("viddial.corpus").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


@dataclass
class StatsReport:
    instances: int = 0
    avg_context_words: float = 0.0
    avg_response_words: float = 0.0
    utterance_histogram: Dict[int, int] = field(default_factory=dict)
    top_words: List[Tuple[str, int]] = field(default_factory=list)

    def to_dict(self):
        return {
            "instances": self.instances,
            "avg_context_words": self.avg_context_words,
            "avg_response_words": self.avg_response_words,
            "utterance_histogram": {str(k): v for k, v in sorted(self.utterance_histogram.items())},
            "top_words": [[w, c] for w, c in self.top_words],
        }


def _is_word(token):
    return token != USER_TAG and any(ch.isalnum() for ch in token)


def corpus_stats(triples, n_top=20):
    if not triples:
        return StatsReport()
    ctx_words = 0
    resp_words = 0
    hist = Counter()
    words = Counter()
    stop = stopwords()
    for t in triples:
        ctx_words += sum(len(u.tokens) for u in t.chat)
        resp_words += len(t.response)
        hist[len(t.chat)] += 1
        for tok in (tok for u in t.chat for tok in u.tokens):
            if _is_word(tok) and tok not in stop:
                words[tok] += 1
        for tok in t.response:
            if _is_word(tok) and tok not in stop:
                words[tok] += 1
    n = len(triples)
    top = sorted(words.items(), key=lambda kv: (-kv[1], kv[0]))[:n_top]
    return StatsReport(n, ctx_words / n, resp_words / n, dict(sorted(hist.items())), top)
