"""Negative sampling for training triples and evaluation candidate lists."""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from viddial.errors import SamplingError


@dataclass
class NegativeSet:
    """Indices of the examples that donate the wrong video, chat and response."""

    video: int
    chat: int
    response: int


def _other_video_pool(pos, examples):
    vid = examples[pos].video_id
    pool = [i for i, ex in enumerate(examples) if ex.video_id != vid]
    if not pool:
        raise SamplingError(f"no examples from a video other than {vid!r}; need at least two videos")
    return pool


def sample_negatives(pos, examples: Sequence, mode="train", rng=None, seed=0, n_eval=9):
    """Draw negatives for ``examples[pos]`` from examples of other videos.

    ``mode="train"`` returns a :class:`NegativeSet` with one donor per
    modality; ``mode="eval"`` returns ``n_eval`` distinct donor indices
    (with replacement only when fewer are available).
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    pool = _other_video_pool(pos, examples)
    if mode == "train":
        v, u, r = rng.choice(pool, size=3, replace=True)
        return NegativeSet(int(v), int(u), int(r))
    if mode == "eval":
        replace = len(pool) < n_eval
        return [int(i) for i in rng.choice(pool, size=n_eval, replace=replace)]
    raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")


@dataclass
class CandidateList:
    """A 10-way list: the positive's own response among 9 donors' responses."""

    instance: int
    sources: List[int]  # example index donating each candidate response
    positive_index: int
    seed: int


def build_eval_lists(examples, seed=0, n_neg=9):
    """One seeded candidate list per example; the positive's slot is random."""
    rng = np.random.default_rng([seed, 0xE1A1])
    lists = []
    for i in range(len(examples)):
        negs = sample_negatives(i, examples, "eval", rng=rng, n_eval=n_neg)
        slot = int(rng.integers(n_neg + 1))
        sources = negs[:slot] + [i] + negs[slot:]
        lists.append(CandidateList(i, sources, slot, seed))
    return lists
