"""Central-difference gradient checking."""
import numpy as np

from viddial.numerics.tensor import Tensor, no_grad


def numerical_grad(f, x: Tensor, eps=1e-5, coords=None):
    """Central differences of ``f`` w.r.t. selected flat coordinates of ``x``."""
    flat = x.data.reshape(-1)
    if coords is None:
        coords = range(flat.size)
    out = {}
    with no_grad():
        for k in coords:
            orig = flat[k]
            flat[k] = orig + eps
            f_plus = float(f(x).data)
            flat[k] = orig - eps
            f_minus = float(f(x).data)
            flat[k] = orig
            out[k] = (f_plus - f_minus) / (2.0 * eps)
    return out


def grad_check(f, x: Tensor, eps=1e-5, max_coords=None, seed=0):
    """Max relative error between the tape gradient and central differences.

    The relative error of a coordinate is ``|a - n| / max(|a|, |n|, 1e-8)``.
    ``max_coords`` checks a seeded random subset of coordinates instead of all.

    Args:
        f: callable mapping ``x`` to a scalar tensor; must be deterministic.
        x: tensor with ``requires_grad=True``; its data is perturbed in place
            and restored.
    """
    x.grad = None
    loss = f(x)
    loss.backward()
    analytic = np.zeros(x.data.size) if x.grad is None else x.grad.reshape(-1).copy()
    x.grad = None
    n = x.data.size
    coords = range(n)
    if max_coords is not None and n > max_coords:
        coords = np.sort(np.random.default_rng(seed).choice(n, size=max_coords, replace=False))
    numeric = numerical_grad(f, x, eps, coords)
    worst = 0.0
    for k, num in numeric.items():
        a = analytic[k]
        denom = max(abs(a), abs(num), 1e-8)
        worst = max(worst, abs(a - num) / denom)
    return worst
