"""Attention mechanisms: trilinear bidirectional flow, self-attention pooling,
and bilinear decoder attention.

Every normalized distribution produced here is reported to any active
:func:`record_attention` block, which is how tests audit them.
"""
import contextlib
import threading
from dataclasses import dataclass
from typing import List

import numpy as np

from viddial.errors import DimensionError
from viddial.numerics import (
    ParameterStore,
    Tensor,
    concat,
    matmul,
    mul,
    reshape,
    softmax,
    tanh,
    transpose,
)

_local = threading.local()


@dataclass
class AttentionMap:
    """Weights normalized along ``axis`` (each slice sums to one)."""

    weights: np.ndarray
    axis: int
    label: str = ""

    def slice_sums(self):
        return self.weights.sum(axis=self.axis)


@contextlib.contextmanager
def record_attention():
    """Collect every :class:`AttentionMap` produced inside the block."""
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = _local.stack = []
    maps: List[AttentionMap] = []
    stack.append(maps)
    try:
        yield maps
    finally:
        stack.pop()


def _report(weights: Tensor, axis, label):
    stack = getattr(_local, "stack", None)
    if stack:
        amap = AttentionMap(weights.data.copy(), axis, label)
        for maps in stack:
            maps.append(amap)


def _split3(w, d):
    return w[:d], w[d:2 * d], w[2 * d:]


def trilinear_similarity(a: Tensor, b: Tensor, w_s: Tensor):
    """``S[i, j] = w_s . [a_i; b_j; a_i * b_j]`` for (m, d) and (n, d) inputs."""
    d = a.shape[1]
    if b.shape[1] != d or w_s.shape != (3 * d,):
        raise DimensionError(f"trilinear similarity shapes {a.shape}, {b.shape}, w_s {w_s.shape}")
    w_a, w_b, w_ab = _split3(w_s, d)
    left = reshape(matmul(a, w_a), (a.shape[0], 1))
    right = reshape(matmul(b, w_b), (1, b.shape[0]))
    cross = matmul(mul(a, w_ab), transpose(b))
    return left + right + cross


def bidaf_flow(a: Tensor, b: Tensor, w_s: Tensor, label="flow"):
    """Bidirectional attention between two state sequences.

    Returns ``(ctx_a, ctx_b, (alpha, beta_t))`` where ``ctx_a[i]`` mixes rows
    of ``b`` with ``alpha = softmax_j(S)`` and ``ctx_b[j]`` mixes rows of ``a``
    with weights normalized over ``i`` for fixed ``j``.
    """
    s = trilinear_similarity(a, b, w_s)
    alpha = softmax(s, axis=1)
    beta_t = transpose(softmax(s, axis=0))
    _report(alpha, 1, f"{label}:a<-b")
    _report(beta_t, 1, f"{label}:b<-a")
    return matmul(alpha, b), matmul(beta_t, a), (alpha, beta_t)


class FlowParams:
    """Trilinear weights for the three modality pairs plus per-modality self-attention."""

    PAIRS = ("vu", "vr", "ur")

    def __init__(self, store: ParameterStore, prefix, state_dim, shared=False):
        self.state_dim = state_dim
        if shared:
            w = store.get(f"{prefix}.w_s", (3 * state_dim,))
            self.w_s = {p: w for p in self.PAIRS}
        else:
            self.w_s = {p: store.get(f"{prefix}.w_s_{p}", (3 * state_dim,)) for p in self.PAIRS}
        aug = 3 * state_dim
        self.self_attn = {m: SelfAttention(store, f"{prefix}.self_{m}", aug) for m in "vur"}


class SelfAttention:
    def __init__(self, store, prefix, dim):
        self.w = store.get(f"{prefix}.w", (dim, dim))
        self.b = store.get(f"{prefix}.b", (dim,))
        self.v = store.get(f"{prefix}.v", (dim,))


def augment_states_tridaf(h_v: Tensor, h_u: Tensor, h_r: Tensor, params: FlowParams):
    """Concatenate each modality's states with context vectors from the other two.

    ``v -> [h_v; c_v<-u; c_v<-r]``, ``u -> [h_u; c_u<-v; c_u<-r]``,
    ``r -> [h_r; c_r<-v; c_r<-u]``.
    """
    c_v_u, c_u_v, _ = bidaf_flow(h_v, h_u, params.w_s["vu"], "vu")
    c_v_r, c_r_v, _ = bidaf_flow(h_v, h_r, params.w_s["vr"], "vr")
    c_u_r, c_r_u, _ = bidaf_flow(h_u, h_r, params.w_s["ur"], "ur")
    return (
        concat([h_v, c_v_u, c_v_r], axis=1),
        concat([h_u, c_u_v, c_u_r], axis=1),
        concat([h_r, c_r_v, c_r_u], axis=1),
    )


def self_attend(states: Tensor, attn: SelfAttention, label="self"):
    """Pool rows with ``softmax_i(v . tanh(W h_i + b))``; returns ``(pooled, weights)``."""
    e = matmul(tanh(matmul(states, transpose(attn.w)) + attn.b), attn.v)
    weights = softmax(e, axis=0)
    _report(weights, 0, label)
    return matmul(weights, states), weights


def bilinear_attention(query: Tensor, keys: Tensor, w_a: Tensor, label="bilinear"):
    """``e_i = q^T W_a k_i``, weights = softmax(e), context = sum_i w_i k_i.

    ``query`` may be (d_q,) or (steps, d_q); then weights are (steps, T).
    """
    if w_a.shape != (query.shape[-1], keys.shape[1]):
        raise DimensionError(f"bilinear attention shapes q={query.shape} keys={keys.shape} W={w_a.shape}")
    e = matmul(matmul(query, w_a), transpose(keys))
    weights = softmax(e, axis=-1)
    _report(weights, weights.ndim - 1, label)
    return matmul(weights, keys), weights
