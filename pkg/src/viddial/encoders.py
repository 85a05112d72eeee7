"""Token embeddings, frame projection and (bi)directional LSTM encoders."""
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from viddial.errors import ConfigError, ContractError, DataError
from viddial.numerics import (
    ParameterStore,
    Tensor,
    concat,
    flip,
    index_select,
    lstm_sequence,
    matmul,
    substream,
)

PAD, UNK, BOS, EOS, USER, SEP = "<PAD>", "<UNK>", "<BOS>", "<EOS>", "<USER>", "<SEP>"
RESERVED = (PAD, UNK, BOS, EOS, USER, SEP)


class Vocab:
    """Token <-> index map; reserved tokens always occupy indices 0..5."""

    def __init__(self, tokens: Sequence[str] = ()):
        self.itos: List[str] = list(RESERVED)
        for t in tokens:
            if t not in RESERVED:
                self.itos.append(t)
        self.stoi: Dict[str, int] = {t: i for i, t in enumerate(self.itos)}
        if len(self.stoi) != len(self.itos):
            raise ConfigError("duplicate tokens in vocabulary")

    def __len__(self):
        return len(self.itos)

    def __contains__(self, token):
        return token in self.stoi

    def index(self, token):
        return self.stoi.get(token, 1)

    def encode(self, tokens):
        return np.array([self.stoi.get(t, 1) for t in tokens], dtype=np.int64)

    def decode(self, ids):
        return [self.itos[int(i)] for i in ids]

    @property
    def pad(self):
        return 0

    @property
    def unk(self):
        return 1

    @property
    def bos(self):
        return 2

    @property
    def eos(self):
        return 3

    @property
    def sep(self):
        return 5


class EmbeddingTable:
    def __init__(self, vocab: Vocab, weight: Tensor):
        if weight.shape[0] != len(vocab):
            raise ConfigError(f"embedding rows {weight.shape[0]} != vocab size {len(vocab)}")
        self.vocab = vocab
        self.weight = weight

    @property
    def dim(self):
        return self.weight.shape[1]

    def lookup(self, tokens_or_ids):
        ids = tokens_or_ids
        if len(ids) and isinstance(ids[0], str):
            ids = self.vocab.encode(ids)
        return index_select(self.weight, np.asarray(ids, dtype=np.int64))


def load_embedding_file(path, d_emb):
    """Parse ``token v1 ... vd`` lines into a dict of vectors."""
    vectors = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                continue
            if len(parts) - 1 != d_emb:
                raise ConfigError(f"{path}:{lineno}: embedding has {len(parts) - 1} values, expected {d_emb}")
            vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
    return vectors


def count_tokens(triples):
    counts = Counter()
    for t in triples:
        for u in t.chat:
            counts.update(u.tokens)
        counts.update(t.response)
    return counts


def build_vocab(training_triples, max_size=27000, d_emb=100, seed=0, embedding_file=None, init_scale=0.08):
    """Vocabulary of the most frequent training tokens plus an embedding matrix.

    ``max_size`` includes the six reserved tokens; ties are broken
    lexicographically. Rows are drawn uniformly from ``[-init_scale,
    init_scale]`` and then overwritten by any vectors in ``embedding_file``.
    """
    counts = count_tokens(training_triples)
    for r in RESERVED:
        counts.pop(r, None)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    keep = max(0, max_size - len(RESERVED))
    vocab = Vocab([t for t, _ in ranked[:keep]])
    matrix = substream(seed, "init/embedding").uniform(-init_scale, init_scale, size=(len(vocab), d_emb))
    if embedding_file is not None:
        for tok, vec in load_embedding_file(embedding_file, d_emb).items():
            if tok in vocab.stoi:
                matrix[vocab.stoi[tok]] = vec
    return EmbeddingTable(vocab, Tensor(matrix, requires_grad=True, name="embedding"))


@dataclass
class EncodedSequence:
    states: Tensor  # (T, H') rows per step
    final: Tensor  # (H',)


class LstmCell:
    """Parameters of one unidirectional LSTM layer (gate blocks i, f, o, g)."""

    def __init__(self, store: ParameterStore, prefix, input_dim, hidden):
        self.input_dim = input_dim
        self.hidden = hidden
        self.w_x = store.get(f"{prefix}.w_x", (input_dim, 4 * hidden))
        self.w_h = store.get(f"{prefix}.w_h", (hidden, 4 * hidden))
        self.b = store.get(f"{prefix}.b", (4 * hidden,))

    def run(self, x, h0=None, c0=None):
        return lstm_sequence(x, self.w_x, self.w_h, self.b, h0, c0)


class SequenceEncoder:
    """Stacked, optionally bidirectional LSTM.

    Each layer's output row ``t`` is ``[fwd_t; bwd_t]``; the final vector is
    the concatenation of the top layer's forward last state and backward
    first state (``final_mode="concat_finals"``), or the top layer's last
    output row (``"last_step"``).
    """

    def __init__(self, store, prefix, input_dim, hidden, layers=1, bidirectional=True, final_mode="concat_finals"):
        if final_mode not in ("concat_finals", "last_step"):
            raise ConfigError(f"unknown final_mode {final_mode!r}")
        self.hidden = hidden
        self.bidirectional = bidirectional
        self.final_mode = final_mode
        self.layers = []
        dim = input_dim
        for layer in range(layers):
            fwd = LstmCell(store, f"{prefix}.l{layer}.fwd", dim, hidden)
            bwd = LstmCell(store, f"{prefix}.l{layer}.bwd", dim, hidden) if bidirectional else None
            self.layers.append((fwd, bwd))
            dim = hidden * (2 if bidirectional else 1)
        self.output_dim = dim

    def encode(self, x: Tensor) -> EncodedSequence:
        if x.shape[0] == 0:
            raise ContractError("cannot encode an empty sequence")
        h = x
        for fwd, bwd in self.layers:
            out_f = fwd.run(h)
            if bwd is None:
                h = out_f
                last_f, last_b = out_f[-1], None
            else:
                out_b = flip(bwd.run(flip(h, 0)), 0)
                h = concat([out_f, out_b], axis=1)
                last_f, last_b = out_f[-1], out_b[0]
        if self.final_mode == "last_step" or last_b is None:
            final = h[-1]
        else:
            final = concat([last_f, last_b])
        return EncodedSequence(h, final)


class FrameProjection:
    def __init__(self, store, prefix, feat_dim, out_dim):
        self.feat_dim = feat_dim
        self.w = store.get(f"{prefix}.w", (feat_dim, out_dim))
        self.b = store.get(f"{prefix}.b", (out_dim,))

    def __call__(self, frames):
        return matmul(frames, self.w) + self.b


def truncate_last(seq, cap):
    return seq[-cap:] if cap is not None and len(seq) > cap else seq


def encode_tokens(tokens, table: EmbeddingTable, encoder: SequenceEncoder, cap=None):
    """Embed and encode ``tokens`` (strings or ids), keeping the last ``cap``."""
    tokens = truncate_last(list(tokens) if not isinstance(tokens, np.ndarray) else tokens, cap)
    if len(tokens) == 0:
        raise ContractError("token sequence is empty after truncation")
    return encoder.encode(table.lookup(tokens))


def encode_frames(frames, projection: FrameProjection, encoder: SequenceEncoder, cap=60):
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[0] < 1:
        raise ContractError(f"need a non-empty (m, d) frame matrix, got {frames.shape}")
    if frames.shape[1] != projection.feat_dim:
        raise DataError(f"frame feature dim {frames.shape[1]} != expected {projection.feat_dim}")
    frames = truncate_last(frames, cap)
    return encoder.encode(projection(Tensor(frames)))


def concat_chat_context(utterances, cap=70):
    """Flatten utterances in time order with ``<SEP>`` between them; keep the last ``cap`` tokens."""
    tokens: List[str] = []
    for i, u in enumerate(sorted(utterances, key=lambda u: u.time)):
        if i:
            tokens.append(SEP)
        tokens.extend(u.tokens)
    return truncate_last(tokens, cap)
