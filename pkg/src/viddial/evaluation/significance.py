"""Paired bootstrap test over per-instance scores."""
import numpy as np

from viddial.errors import ContractError


def bootstrap_significance(per_instance_a, per_instance_b, n=100_000, seed=0, chunk=2000):
    """One-sided p-value for "system a is better than system b".

    Resamples instances with replacement ``n`` times and reports the fraction
    of resamples whose mean difference ``a - b`` is not positive.
    """
    a = np.asarray(per_instance_a, dtype=np.float64)
    b = np.asarray(per_instance_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ContractError(f"paired records differ in shape: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ContractError("no records")
    diff = a - b
    rng = np.random.default_rng(seed)
    not_better = 0
    done = 0
    while done < n:
        k = min(chunk, n - done)
        idx = rng.integers(0, diff.size, size=(k, diff.size))
        not_better += int(np.count_nonzero(diff[idx].mean(axis=1) <= 0))
        done += k
    return not_better / n
