"""Time the compiled and python kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--steps 60] [--hidden 64]

Prints one line per kernel and backend with the best wall time and the
speedup of the compiled backend. Outputs of both backends are compared first.
"""
import argparse
import random
import timeit

import numpy as np

from viddial.numerics import kernels


def lstm_inputs(rng, steps, hidden):
    pre = rng.normal(size=(steps, 4 * hidden))
    w_h = rng.normal(scale=0.1, size=(hidden, 4 * hidden))
    h0 = rng.normal(size=hidden)
    c0 = rng.normal(size=hidden)
    return pre, w_h, h0, c0


def cases(steps, hidden, seq_len):
    rng = np.random.default_rng(0)
    pre, w_h, h0, c0 = lstm_inputs(rng, steps, hidden)
    hs, cs, gates = kernels.get_backend("python").lstm_forward(pre, w_h, h0, c0)
    d_hs = rng.normal(size=hs.shape)
    r = random.Random(0)
    a = [r.randrange(8) for _ in range(seq_len)]
    b = [r.randrange(8) for _ in range(seq_len)]
    return {
        "lstm_forward": lambda k: k.lstm_forward(pre, w_h, h0, c0),
        "lstm_backward": lambda k: k.lstm_backward(d_hs, w_h, c0, cs, gates),
        "lcs_length": lambda k: k.lcs_length(a, b),
    }


def _same(x, y):
    if isinstance(x, tuple):
        return all(_same(u, v) for u, v in zip(x, y))
    return np.allclose(x, y, rtol=1e-10, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    ap.add_argument("--steps", type=int, default=60)
    ap.add_argument("--hidden", type=int, default=64)
    ap.add_argument("--seq-len", type=int, default=200)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (active: {kernels.BACKEND})")
    if "compiled" not in backends:
        print("compiled extension not built; timing the python backend only")
    for name, fn in cases(args.steps, args.hidden, args.seq_len).items():
        outs = {b: fn(kernels.get_backend(b)) for b in backends}
        if len(outs) == 2 and not _same(outs["python"], outs["compiled"]):
            raise SystemExit(f"{name}: backends disagree")
        best = {}
        for b in backends:
            k = kernels.get_backend(b)
            t = timeit.repeat(lambda: fn(k), number=args.number, repeat=args.repeat)
            best[b] = min(t) / args.number
            print(f"{name:14s} {b:9s} {best[b] * 1e6:10.1f} us")
        if len(best) == 2:
            print(f"{name:14s} speedup   {best['python'] / best['compiled']:10.2f}x")


if __name__ == "__main__":
    main()
