"""Independent reference implementations used only by the tests.

They are written without reusing any package code so that agreement is
evidence of correctness rather than of shared bugs.
"""
import math
from fractions import Fraction
from functools import lru_cache


def _grams(tokens, n):
    out = []
    i = 0
    while i + n <= len(tokens):
        out.append(" ".join(tokens[i:i + n]))
        i += 1
    return out


def bleu_oracle(hyp, ref, smoothing=True):
    """Sentence BLEU-4 computed with exact fractions, then one float root."""
    product = Fraction(1)
    for n in (1, 2, 3, 4):
        h = _grams(hyp, n)
        r = _grams(ref, n)
        remaining = list(r)
        hits = 0
        for g in h:
            if g in remaining:
                remaining.remove(g)
                hits += 1
        num, den = (hits + 1, len(h) + 1) if smoothing else (hits, len(h))
        if num == 0 or den == 0:
            return 0.0
        product *= Fraction(num, den)
    geo = float(product) ** 0.25
    if len(hyp) < len(ref):
        geo *= math.exp(1 - len(ref) / len(hyp))
    return geo


def lcs_oracle(a, b):
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def rouge_l_oracle(hyp, refs, beta=1.2):
    best = 0.0
    for ref in refs:
        lcs = lcs_oracle(hyp, ref)
        if lcs == 0:
            continue
        p, r = lcs / len(hyp), lcs / len(ref)
        best = max(best, (1 + beta ** 2) * p * r / (r + beta ** 2 * p))
    return best


def _sig(x):
    return 1.0 / (1.0 + math.exp(-x))


def lstm_oracle(xs, w_x, w_h, b, h0=None, c0=None):
    """Scalar-loop LSTM with gate blocks ordered input, forget, output, candidate.

    ``w_x`` is (input, 4H), ``w_h`` is (H, 4H), all plain nested lists.
    """
    hidden = len(w_h)
    h = list(h0) if h0 is not None else [0.0] * hidden
    c = list(c0) if c0 is not None else [0.0] * hidden
    states = []
    for x in xs:
        pre = []
        for k in range(4 * hidden):
            s = b[k]
            for i, xi in enumerate(x):
                s += xi * w_x[i][k]
            for j, hj in enumerate(h):
                s += hj * w_h[j][k]
            pre.append(s)
        new_h, new_c = [], []
        for j in range(hidden):
            i_g = _sig(pre[j])
            f_g = _sig(pre[hidden + j])
            o_g = _sig(pre[2 * hidden + j])
            g_g = math.tanh(pre[3 * hidden + j])
            cj = f_g * c[j] + i_g * g_g
            new_c.append(cj)
            new_h.append(o_g * math.tanh(cj))
        h, c = new_h, new_c
        states.append(list(h))
    return states


def bootstrap_exact(a, b):
    """Exact paired-bootstrap p-value by enumerating every resample of the indices."""
    from itertools import product

    diff = [x - y for x, y in zip(a, b)]
    n = len(diff)
    not_better = 0
    total = 0
    for idx in product(range(n), repeat=n):
        total += 1
        if sum(diff[i] for i in idx) <= 0:
            not_better += 1
    return Fraction(not_better, total)


def gaussian_nb_oracle(xs, ys, query, floor=1e-6):
    """Posterior of class 1 under per-feature Gaussians with population variance."""
    post = {}
    for c in (0, 1):
        rows = [x for x, y in zip(xs, ys) if y == c]
        logp = math.log(len(rows) / len(xs))
        for j in range(len(query)):
            col = [r[j] for r in rows]
            mu = sum(col) / len(col)
            var = max(sum((v - mu) ** 2 for v in col) / len(col), floor)
            logp += -0.5 * math.log(2 * math.pi * var) - (query[j] - mu) ** 2 / (2 * var)
        post[c] = logp
    return 1.0 / (1.0 + math.exp(post[0] - post[1]))
