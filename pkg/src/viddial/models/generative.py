"""Attention encoder-decoder response generators (seq2seq and BiDAF)."""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from viddial.attention import bidaf_flow, bilinear_attention
from viddial.encoders import EmbeddingTable, FrameProjection, LstmCell, SequenceEncoder, Vocab, encode_frames
from viddial.errors import ConfigError
from viddial.models.config import GenerativeConfig
from viddial.models.losses import generative_max_margin, joint_loss
from viddial.numerics import (
    ParameterStore,
    Tensor,
    concat,
    index_select,
    log_softmax,
    matmul,
    neg,
    no_grad,
    tanh,
    tsum,
)


@dataclass
class DecoderContext:
    keys_v: Optional[Tensor]
    keys_u: Optional[Tensor]
    h0: List[Tensor]


@dataclass
class DecodeResult:
    logp: Tensor  # (steps, |V|)
    video_weights: Optional[Tensor]  # (steps, m)
    chat_weights: Optional[Tensor]  # (steps, n)


class GenerativeModel:
    kind = "generative"

    def __init__(self, cfg: GenerativeConfig, vocab: Vocab, feat_dim, seed=0, embedding: Tensor = None):
        self.cfg = cfg
        self.vocab = vocab
        self.feat_dim = feat_dim
        self.seed = seed
        self.store = store = ParameterStore(seed, cfg.init_scale)
        if embedding is not None:
            store.register("embedding", embedding)
        self.embedding = EmbeddingTable(vocab, store.get("embedding", (len(vocab), cfg.d_emb)))
        v = cfg.variant
        self.uses_video = v != "seq2seq_chat"
        self.uses_chat = v != "seq2seq_video"
        hidden = cfg.hidden
        state = None
        if self.uses_video:
            self.projection = FrameProjection(store, "video_proj", feat_dim, cfg.proj_dim)
            self.enc_video = SequenceEncoder(store, "enc_video", cfg.proj_dim, hidden, cfg.enc_layers, True, cfg.final_mode)
            state = self.enc_video.output_dim
        if self.uses_chat:
            self.enc_chat = SequenceEncoder(store, "enc_chat", cfg.d_emb, hidden, cfg.enc_layers, True, cfg.final_mode)
            state = self.enc_chat.output_dim
        n_ctx = int(self.uses_video) + int(self.uses_chat)
        if v == "bidaf":
            self.w_s = store.get("bidaf.w_s", (3 * state,))
            key_dim = 2 * state
        else:
            key_dim = state
        self.decoder = [
            LstmCell(store, f"dec.l{layer}", cfg.d_emb if layer == 0 else hidden, hidden)
            for layer in range(cfg.dec_layers)
        ]
        self.init_w = [store.get(f"dec_init.l{layer}.w", (n_ctx * state, hidden)) for layer in range(cfg.dec_layers)]
        self.init_b = [store.get(f"dec_init.l{layer}.b", (hidden,)) for layer in range(cfg.dec_layers)]
        if self.uses_video:
            self.att_v = store.get("att_video.w", (hidden, key_dim))
        if self.uses_chat:
            self.att_u = store.get("att_chat.w", (hidden, key_dim))
        self.w_c = store.get("combine.w", (n_ctx * key_dim + hidden, hidden))
        self.w_o = store.get("out.w", (hidden, len(vocab)))
        self.b_o = store.get("out.b", (len(vocab),))

    # -- encoding ------------------------------------------------------
    def encode_video(self, frames):
        if not self.uses_video:
            return None
        return encode_frames(frames, self.projection, self.enc_video, self.cfg.video_cap)

    def encode_chat(self, ids):
        if not self.uses_chat:
            return None
        return self.enc_chat.encode(self.embedding.lookup(ids[-self.cfg.chat_cap:]))

    def context(self, ev, eu) -> DecoderContext:
        if (self.uses_video and ev is None) or (self.uses_chat and eu is None):
            raise ConfigError(f"variant {self.cfg.variant} is missing an input modality")
        keys_v = ev.states if ev is not None else None
        keys_u = eu.states if eu is not None else None
        if self.cfg.variant == "bidaf":
            c_v, c_u, _ = bidaf_flow(keys_v, keys_u, self.w_s, "bidaf")
            keys_v = concat([keys_v, c_v], axis=1)
            keys_u = concat([keys_u, c_u], axis=1)
        finals = [e.final for e in (ev, eu) if e is not None]
        joined = finals[0] if len(finals) == 1 else concat(finals)
        h0 = [matmul(joined, w) + b for w, b in zip(self.init_w, self.init_b)]
        return DecoderContext(keys_v, keys_u, h0)

    def encode_context(self, frames, chat_ids):
        return self.context(self.encode_video(frames), self.encode_chat(chat_ids))

    # -- decoding ------------------------------------------------------
    def decode(self, ctx: DecoderContext, input_ids) -> DecodeResult:
        """Teacher-forced pass: next-token log-probabilities for every input step."""
        h = self.embedding.lookup(np.asarray(input_ids, dtype=np.int64))
        for cell, h0 in zip(self.decoder, ctx.h0):
            h = cell.run(h, h0=h0)
        parts = []
        wv = wu = None
        if ctx.keys_v is not None:
            cv, wv = bilinear_attention(h, ctx.keys_v, self.att_v, "dec_video")
            parts.append(cv)
        if ctx.keys_u is not None:
            cu, wu = bilinear_attention(h, ctx.keys_u, self.att_u, "dec_chat")
            parts.append(cu)
        parts.append(h)
        fused = tanh(matmul(concat(parts, axis=1), self.w_c))
        logp = log_softmax(matmul(fused, self.w_o) + self.b_o, axis=1)
        return DecodeResult(logp, wv, wu)

    def sequence_logprob(self, ctx, response_ids):
        """Summed log-likelihood of ``response_ids`` followed by ``<EOS>``."""
        ids = list(np.asarray(response_ids, dtype=np.int64)[-self.cfg.response_cap:])
        inputs = [self.vocab.bos] + ids
        targets = ids + [self.vocab.eos]
        res = self.decode(ctx, inputs)
        picked = index_select(res.logp, (np.arange(len(targets)), np.array(targets, dtype=np.int64)))
        return tsum(picked), len(targets)

    def example_loss(self, ex, neg_set=None, donors=None, return_parts=False):
        ev = self.encode_video(ex.frames)
        eu = self.encode_chat(ex.chat_ids)
        ctx = self.context(ev, eu)
        lp_pos, n_tokens = self.sequence_logprob(ctx, ex.response_ids)
        xe = neg(lp_pos)
        mm = None
        if neg_set is not None and self.cfg.lam > 0:
            lp_v = lp_u = None
            lp_r, _ = self.sequence_logprob(ctx, donors[neg_set.response].response_ids)
            if self.cfg.negatives == 3:
                if self.uses_video:
                    ctx_v = self.context(self.encode_video(donors[neg_set.video].frames), eu)
                    lp_v, _ = self.sequence_logprob(ctx_v, ex.response_ids)
                if self.uses_chat:
                    ctx_u = self.context(ev, self.encode_chat(donors[neg_set.chat].chat_ids))
                    lp_u, _ = self.sequence_logprob(ctx_u, ex.response_ids)
            mm = generative_max_margin(lp_pos, lp_v, lp_u, lp_r, self.cfg.margin)
            loss = joint_loss(xe, mm, self.cfg.lam)
        else:
            loss = xe
        if return_parts:
            return loss, {"xe": float(xe.data), "tokens": n_tokens, "mm": None if mm is None else float(mm.data)}
        return loss

    def score_candidates(self, ex, candidate_ids):
        """Response log-likelihood of each candidate (summed, or per token)."""
        with no_grad():
            ctx = self.encode_context(ex.frames, ex.chat_ids)
            scores = []
            for c in candidate_ids:
                lp, n = self.sequence_logprob(ctx, c)
                s = float(lp.data)
                scores.append(s / n if self.cfg.score_norm == "mean" else s)
            return scores

    def generate(self, ex, max_len=None):
        """Greedy decoding; returns ``(tokens, steps)`` with per-token attention rows."""
        max_len = self.cfg.max_decode_len if max_len is None else max_len
        out: List[int] = []
        steps = []
        if max_len <= 0:
            return [], steps
        with no_grad():
            ctx = self.encode_context(ex.frames, ex.chat_ids)
            for _ in range(max_len):
                res = self.decode(ctx, [self.vocab.bos] + out)
                nxt = int(np.argmax(res.logp.data[-1]))
                if nxt == self.vocab.eos:
                    break
                out.append(nxt)
                steps.append({
                    "token": self.vocab.itos[nxt],
                    "video": None if res.video_weights is None else res.video_weights.data[-1].copy(),
                    "chat": None if res.chat_weights is None else res.chat_weights.data[-1].copy(),
                })
        return self.vocab.decode(out), steps

    def selection_metric(self):
        return "meteor_lite"
