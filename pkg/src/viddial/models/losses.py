"""Ranking and likelihood losses."""
from viddial.numerics import add, as_tensor, clamp_min, hinge, log, neg

PROB_FLOOR = 1e-12


def safe_log(p):
    return log(clamp_min(as_tensor(p), PROB_FLOOR))


def _sum(terms):
    total = terms[0]
    for t in terms[1:]:
        total = add(total, t)
    return total


def hinge_terms(logp_pos, logp_negs, margin):
    """``sum_k max(0, M + logp_neg_k - logp_pos)`` over non-``None`` negatives."""
    terms = [hinge(margin + as_tensor(n) - logp_pos) for n in logp_negs if n is not None]
    if not terms:
        return as_tensor(0.0)
    return _sum(terms)


def max_margin_loss(p_pos, p_vneg, p_uneg, p_rneg, margin=0.1):
    """Triple-ranking hinge loss on probabilities.

    Each negative may be ``None`` (unused modality, or a 1-negative setup).
    """
    lp = safe_log(p_pos)
    negs = [None if p is None else safe_log(p) for p in (p_vneg, p_uneg, p_rneg)]
    return hinge_terms(lp, negs, margin)


def classification_loss(p_pos, p_negs):
    """Binary cross-entropy: positive labelled 1, every negative labelled 0."""
    total = neg(safe_log(p_pos))
    for p in p_negs:
        if p is None:
            continue
        total = total - safe_log(1.0 - as_tensor(p))
    return total


def generative_max_margin(logp_pos, logp_vneg, logp_uneg, logp_rneg, margin=0.1):
    """Hinges on summed response log-likelihoods under corrupted inputs."""
    return hinge_terms(as_tensor(logp_pos), (logp_vneg, logp_uneg, logp_rneg), margin)


def joint_loss(xe, mm, lam=1.0):
    if lam == 0:
        return as_tensor(xe)
    return as_tensor(xe) + lam * as_tensor(mm)
