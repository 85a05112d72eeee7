"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` exactly and are used whenever the compiled
extension is unavailable. Gate layout in every kernel is ``[i, f, o, g]``.
"""
import numpy as np


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def lstm_forward(pre, w_h, h0, c0):
    """Run the LSTM recurrence over precomputed input projections.

    Args:
        pre: (T, 4H) array holding ``x_t @ W_x + b`` for every step.
        w_h: (H, 4H) recurrent weights.
        h0, c0: (H,) initial hidden and cell states.

    Returns:
        ``(hs, cs, gates)`` with shapes (T, H), (T, H), (T, 4H); gates are
        post-activation.
    """
    steps = pre.shape[0]
    hidden = w_h.shape[0]
    hs = np.empty((steps, hidden))
    cs = np.empty((steps, hidden))
    gates = np.empty((steps, 4 * hidden))
    h, c = h0, c0
    for t in range(steps):
        z = pre[t] + h @ w_h
        ifo = _sigmoid(z[: 3 * hidden])
        g = np.tanh(z[3 * hidden:])
        i, f, o = ifo[:hidden], ifo[hidden: 2 * hidden], ifo[2 * hidden:]
        c = f * c + i * g
        h = o * np.tanh(c)
        gates[t, : 3 * hidden] = ifo
        gates[t, 3 * hidden:] = g
        hs[t] = h
        cs[t] = c
    return hs, cs, gates


def lstm_backward(d_hs, w_h, c0, cs, gates):
    """Backpropagate through :func:`lstm_forward`.

    Returns ``(d_pre, d_h0, d_c0)``; weight gradients are assembled by the
    caller from ``d_pre``.
    """
    steps, hidden = d_hs.shape
    d_pre = np.empty((steps, 4 * hidden))
    dh_next = np.zeros(hidden)
    dc_next = np.zeros(hidden)
    for t in range(steps - 1, -1, -1):
        g_t = gates[t]
        i, f = g_t[:hidden], g_t[hidden: 2 * hidden]
        o, g = g_t[2 * hidden: 3 * hidden], g_t[3 * hidden:]
        c_prev = cs[t - 1] if t > 0 else c0
        tc = np.tanh(cs[t])
        dh = d_hs[t] + dh_next
        dc = dc_next + dh * o * (1.0 - tc * tc)
        dz = d_pre[t]
        dz[:hidden] = dc * g * i * (1.0 - i)
        dz[hidden: 2 * hidden] = dc * c_prev * f * (1.0 - f)
        dz[2 * hidden: 3 * hidden] = dh * tc * o * (1.0 - o)
        dz[3 * hidden:] = dc * i * (1.0 - g * g)
        dc_next = dc * f
        dh_next = w_h @ dz
    return d_pre, dh_next, dc_next


def lcs_length(a, b):
    """Length of the longest common subsequence of two int sequences."""
    if len(a) == 0 or len(b) == 0:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            if x == y:
                cur.append(prev[j] + 1)
            else:
                cur.append(max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]
