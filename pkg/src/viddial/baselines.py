"""Simple retrieval baselines over language-model text representations.

The representer is an LSTM language model trained on training-split chat
text; its final hidden state represents a chat context or a response.
"""
from collections import Counter
from dataclasses import asdict, dataclass, fields

import numpy as np

from viddial.encoders import EmbeddingTable, LstmCell, Vocab
from viddial.errors import ConfigError
from viddial.models.negatives import sample_negatives
from viddial.numerics import ParameterStore, index_select, log_softmax, matmul, neg, no_grad, tsum

VARIANCE_FLOOR = 1e-6


@dataclass
class LmConfig:
    d_emb: int = 100
    hidden: int = 256
    max_len: int = 70
    init_scale: float = 0.08

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: v for k, v in d.items() if k in {f.name for f in fields(cls)}})


class LanguageModel:
    """Single-layer LSTM language model; also the baselines' text representer."""

    kind = "lm"

    def __init__(self, cfg: LmConfig, vocab: Vocab, seed=0):
        self.cfg = cfg
        self.vocab = vocab
        self.seed = seed
        self.feat_dim = None
        self.store = ParameterStore(seed, cfg.init_scale)
        self.embedding = EmbeddingTable(vocab, self.store.get("embedding", (len(vocab), cfg.d_emb)))
        self.cell = LstmCell(self.store, "lm", cfg.d_emb, cfg.hidden)
        self.w_o = self.store.get("lm_out.w", (cfg.hidden, len(vocab)))
        self.b_o = self.store.get("lm_out.b", (len(vocab),))

    def _ids(self, tokens):
        if len(tokens) and isinstance(tokens[0], str):
            tokens = self.vocab.encode(tokens)
        return list(np.asarray(tokens, dtype=np.int64)[-self.cfg.max_len:])

    def sequence_nll(self, tokens):
        ids = self._ids(tokens)
        inputs = [self.vocab.bos] + ids
        targets = ids + [self.vocab.eos]
        h = self.cell.run(self.embedding.lookup(np.array(inputs, dtype=np.int64)))
        logp = log_softmax(matmul(h, self.w_o) + self.b_o, axis=1)
        return neg(tsum(index_select(logp, (np.arange(len(targets)), np.array(targets)))))

    def example_loss(self, ex, neg_set=None, donors=None):
        return self.sequence_nll(ex.chat_ids)

    def represent(self, tokens):
        """Final hidden state after reading ``tokens`` (zeros for empty input)."""
        ids = self._ids(tokens)
        if not ids:
            return np.zeros(self.cfg.hidden)
        with no_grad():
            h = self.cell.run(self.embedding.lookup(np.array(ids, dtype=np.int64)))
        return h.data[-1].copy()


def cosine(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def _normalized(tokens):
    return " ".join(tokens).lower()


def ranking_to_scores(order):
    """Scores whose descending order (ties by index) reproduces ``order``."""
    scores = [0.0] * len(order)
    for rank, idx in enumerate(order):
        scores[idx] = -float(rank)
    return scores


def response_counts(training_responses):
    return Counter(_normalized(r) for r in training_responses)


def most_frequent_rank(candidates, train_counts):
    """Candidate indices by descending training frequency, ties lexicographic."""
    keys = [_normalized(c) for c in candidates]
    return sorted(range(len(candidates)), key=lambda i: (-train_counts.get(keys[i], 0), keys[i], i))


def _rank_by(scores):
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def chat_response_cosine_rank(chat_context, candidates, lm, return_scores=False):
    ctx = lm.represent(chat_context)
    scores = [cosine(ctx, lm.represent(c)) for c in candidates]
    order = _rank_by(scores)
    return (order, scores) if return_scores else order


class NearestNeighbor:
    """Ranks candidates by mean cosine to the responses of the K closest training contexts."""

    def __init__(self, train_pairs, lm, k=5):
        if k < 1 or k > len(train_pairs):
            raise ConfigError(f"K={k} must lie in [1, {len(train_pairs)}]")
        self.k = k
        self.lm = lm
        self.ctx_reps = [lm.represent(c) for c, _ in train_pairs]
        self.resp_reps = [lm.represent(r) for _, r in train_pairs]

    def neighbors(self, chat_context):
        q = self.lm.represent(chat_context)
        sims = [cosine(q, c) for c in self.ctx_reps]
        return _rank_by(sims)[: self.k]

    def scores(self, chat_context, candidates):
        nbrs = self.neighbors(chat_context)
        out = []
        for c in candidates:
            rep = self.lm.represent(c)
            out.append(float(np.mean([cosine(rep, self.resp_reps[j]) for j in nbrs])))
        return out


def nearest_neighbor_rank(chat_context, candidates, train_set, K, lm):
    return _rank_by(NearestNeighbor(train_set, lm, K).scores(chat_context, candidates))


# -- trained baselines -----------------------------------------------------
def pair_features(lm, chat_tokens, response_tokens):
    return np.concatenate([lm.represent(chat_tokens), lm.represent(response_tokens)])


def build_classifier_data(examples, lm, seed=0):
    """Positives plus sampled wrong-chat and wrong-response negatives.

    Frame features are not part of these text features, so a wrong-video
    negative would duplicate its positive; it is skipped.
    """
    rng = np.random.default_rng([seed, 0xBA5E])
    xs, ys = [], []
    for i, ex in enumerate(examples):
        negs = sample_negatives(i, examples, "train", rng=rng)
        xs.append(pair_features(lm, ex.chat_tokens, ex.response_tokens))
        ys.append(1)
        xs.append(pair_features(lm, examples[negs.chat].chat_tokens, ex.response_tokens))
        ys.append(0)
        xs.append(pair_features(lm, ex.chat_tokens, examples[negs.response].response_tokens))
        ys.append(0)
    return np.array(xs), np.array(ys)


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


class LogisticRegression:
    def __init__(self, lr=0.5, iterations=2000, l2=1e-4):
        self.lr = lr
        self.iterations = iterations
        self.l2 = l2
        self.w = None
        self.b = 0.0

    def fit(self, x, y):
        """Full-batch gradient descent on the mean log loss."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        self.w = np.zeros(x.shape[1])
        self.b = 0.0
        n = len(y)
        for _ in range(self.iterations):
            p = _sigmoid(x @ self.w + self.b)
            err = p - y
            self.w -= self.lr * (x.T @ err / n + self.l2 * self.w)
            self.b -= self.lr * err.mean()
        return self

    def predict_proba(self, x):
        return _sigmoid(np.asarray(x, dtype=np.float64) @ self.w + self.b)


class GaussianNaiveBayes:
    def fit(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y)
        self.classes = np.array([0, 1])
        self.prior = np.array([np.mean(y == c) for c in self.classes])
        self.mu = np.array([x[y == c].mean(axis=0) for c in self.classes])
        self.var = np.array([np.maximum(x[y == c].var(axis=0), VARIANCE_FLOOR) for c in self.classes])
        return self

    def predict_proba(self, x):
        """Posterior probability of class 1."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        ll = []
        for c in range(2):
            lp = -0.5 * (np.log(2 * np.pi * self.var[c]) + (x - self.mu[c]) ** 2 / self.var[c]).sum(axis=1)
            ll.append(lp + np.log(max(self.prior[c], 1e-300)))
        ll = np.array(ll)
        return _sigmoid(ll[1] - ll[0])


# -- scorer adapters for the retrieval protocol ---------------------------
def most_frequent_scorer(training_examples):
    counts = response_counts(ex.response_tokens for ex in training_examples)

    def score(ex, candidates):
        return ranking_to_scores(most_frequent_rank([c.response_tokens for c in candidates], counts))

    return score


def cosine_scorer(lm):
    def score(ex, candidates):
        _, scores = chat_response_cosine_rank(ex.chat_tokens, [c.response_tokens for c in candidates], lm, True)
        return scores

    return score


def nearest_neighbor_scorer(training_examples, lm, k=5):
    nn = NearestNeighbor([(e.chat_tokens, e.response_tokens) for e in training_examples], lm, k)

    def score(ex, candidates):
        return nn.scores(ex.chat_tokens, [c.response_tokens for c in candidates])

    return score


def classifier_scorer(clf, lm):
    def score(ex, candidates):
        feats = np.array([pair_features(lm, ex.chat_tokens, c.response_tokens) for c in candidates])
        return [float(p) for p in clf.predict_proba(feats)]

    return score


BASELINE_NAMES = ("most_frequent", "chat_cosine", "nearest_neighbor", "logreg", "naive_bayes")


def make_baseline_scorer(name, training_examples, lm=None, k=5, seed=0):
    if name == "most_frequent":
        return most_frequent_scorer(training_examples)
    if lm is None:
        raise ConfigError(f"baseline {name!r} needs a trained language model")
    if name == "chat_cosine":
        return cosine_scorer(lm)
    if name == "nearest_neighbor":
        return nearest_neighbor_scorer(training_examples, lm, k)
    if name in ("logreg", "naive_bayes"):
        x, y = build_classifier_data(training_examples, lm, seed)
        clf = LogisticRegression() if name == "logreg" else GaussianNaiveBayes()
        return classifier_scorer(clf.fit(x, y), lm)
    raise ConfigError(f"unknown baseline {name!r}")
