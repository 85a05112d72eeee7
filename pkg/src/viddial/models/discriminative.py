"""Dual, triple and TriDAF response rankers.

All variants share the scoring form ``sigmoid(ctx^T W resp + b)``; they
differ in how ``ctx`` and ``resp`` are built from the encoders.
"""
from viddial.attention import FlowParams, augment_states_tridaf, self_attend
from viddial.encoders import EmbeddingTable, FrameProjection, SequenceEncoder, Vocab, encode_frames
from viddial.errors import ConfigError
from viddial.models.config import DiscriminativeConfig
from viddial.models.losses import classification_loss, max_margin_loss
from viddial.numerics import ParameterStore, Tensor, concat, matmul, no_grad, sigmoid, tsum


class DiscriminativeModel:
    kind = "discriminative"

    def __init__(self, cfg: DiscriminativeConfig, vocab: Vocab, feat_dim, seed=0, embedding: Tensor = None):
        self.cfg = cfg
        self.vocab = vocab
        self.feat_dim = feat_dim
        self.seed = seed
        self.store = store = ParameterStore(seed, cfg.init_scale)
        if embedding is not None:
            store.register("embedding", embedding)
        weight = store.get("embedding", (len(vocab), cfg.d_emb))
        self.embedding = EmbeddingTable(vocab, weight)
        v = cfg.variant
        self.uses_video = v != "dual_chat"
        self.uses_chat = v != "dual_video"

        def encoder(name, dim):
            return SequenceEncoder(store, name, dim, cfg.hidden, cfg.layers, True, cfg.final_mode)

        if self.uses_video:
            self.projection = FrameProjection(store, "video_proj", feat_dim, cfg.proj_dim)
            self.enc_video = encoder("enc_video", cfg.proj_dim)
        if self.uses_chat:
            self.enc_chat = encoder("enc_chat", cfg.d_emb)
        self.enc_resp = encoder("enc_resp", cfg.d_emb)
        state = self.enc_resp.output_dim
        n_ctx = int(self.uses_video) + int(self.uses_chat)
        if v == "tridaf":
            self.flow = FlowParams(store, "flow", state, shared=cfg.share_flow_weights)
            ctx_dim, resp_dim = n_ctx * 3 * state, 3 * state
        else:
            ctx_dim, resp_dim = n_ctx * state, state
        self.w = store.get("score.w", (ctx_dim, resp_dim))
        self.b = store.get("score.b", (1,))

    # -- encoders ------------------------------------------------------
    def encode_video(self, frames):
        if not self.uses_video:
            return None
        return encode_frames(frames, self.projection, self.enc_video, self.cfg.video_cap)

    def encode_chat(self, ids):
        if not self.uses_chat:
            return None
        return self.enc_chat.encode(self.embedding.lookup(ids[-self.cfg.chat_cap:]))

    def encode_response(self, ids):
        return self.enc_resp.encode(self.embedding.lookup(ids[-self.cfg.response_cap:]))

    # -- scoring -------------------------------------------------------
    def logit(self, ev, eu, er):
        if (self.uses_video and ev is None) or (self.uses_chat and eu is None) or er is None:
            raise ConfigError(f"variant {self.cfg.variant} is missing an input modality")
        if self.cfg.variant == "tridaf":
            hv, hu, hr = augment_states_tridaf(ev.states, eu.states, er.states, self.flow)
            cv, _ = self_attend(hv, self.flow.self_attn["v"], "self_v")
            cu, _ = self_attend(hu, self.flow.self_attn["u"], "self_u")
            resp, _ = self_attend(hr, self.flow.self_attn["r"], "self_r")
            ctx = concat([cv, cu])
        else:
            parts = []
            if self.uses_video:
                parts.append(ev.final)
            if self.uses_chat:
                parts.append(eu.final)
            ctx = parts[0] if len(parts) == 1 else concat(parts)
            resp = er.final
        return tsum(matmul(matmul(ctx, self.w), resp)) + tsum(self.b)

    def probability(self, ev, eu, er):
        return sigmoid(self.logit(ev, eu, er))

    def score_triple(self, frames, chat_ids, response_ids):
        return self.probability(self.encode_video(frames), self.encode_chat(chat_ids), self.encode_response(response_ids))

    # -- training objective --------------------------------------------
    def example_loss(self, ex, neg=None, donors=None):
        """Loss of one positive example against its sampled negatives.

        Args:
            ex: the positive :class:`~viddial.models.data.Example`.
            neg: :class:`~viddial.models.negatives.NegativeSet` of donor indices.
            donors: sequence of examples the indices refer to.
        """
        ev = self.encode_video(ex.frames)
        eu = self.encode_chat(ex.chat_ids)
        er = self.encode_response(ex.response_ids)
        p_pos = self.probability(ev, eu, er)
        p_v = p_u = p_r = None
        if neg is not None:
            p_r = self.probability(ev, eu, self.encode_response(donors[neg.response].response_ids))
            if self.cfg.negatives == 3:
                if self.uses_video:
                    p_v = self.probability(self.encode_video(donors[neg.video].frames), eu, er)
                if self.uses_chat:
                    p_u = self.probability(ev, self.encode_chat(donors[neg.chat].chat_ids), er)
        if self.cfg.loss == "classification":
            return classification_loss(p_pos, [p_v, p_u, p_r])
        return max_margin_loss(p_pos, p_v, p_u, p_r, self.cfg.margin)

    def score_candidates(self, ex, candidate_ids):
        """Positive-class probability of each candidate response for ``ex``'s context."""
        with no_grad():
            ev = self.encode_video(ex.frames)
            eu = self.encode_chat(ex.chat_ids)
            return [float(self.probability(ev, eu, self.encode_response(c)).data) for c in candidate_ids]

    def selection_metric(self):
        return "recall@1"
