"""Tensor arithmetic, reverse-mode differentiation and optimization."""
from viddial.numerics import kernels
from viddial.numerics.gradcheck import grad_check, numerical_grad
from viddial.numerics.params import Adam, ParameterStore, clip_grad_norm, global_grad_norm, substream
from viddial.numerics.tensor import (
    Tensor,
    add,
    as_tensor,
    clamp_min,
    concat,
    exp,
    flip,
    grad_enabled,
    hinge,
    index_select,
    log,
    log_sigmoid,
    log_softmax,
    lstm_sequence,
    matmul,
    mean,
    mul,
    neg,
    no_grad,
    relu,
    reshape,
    sigmoid,
    softmax,
    stack,
    sub,
    tanh,
    transpose,
    tsum,
    zeros,
)

__all__ = [
    "Adam", "ParameterStore", "Tensor", "add", "as_tensor", "clamp_min", "clip_grad_norm",
    "concat", "exp", "flip", "global_grad_norm", "grad_check", "grad_enabled", "hinge",
    "index_select", "kernels", "log", "log_sigmoid", "log_softmax", "lstm_sequence", "matmul",
    "mean", "mul", "neg", "no_grad", "numerical_grad", "relu", "reshape", "sigmoid", "softmax",
    "stack", "sub", "substream", "tanh", "transpose", "tsum", "zeros",
]
