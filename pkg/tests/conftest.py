import json
import os

import numpy as np
import pytest

from viddial.encoders import Vocab
from viddial.models import Example, NegativeSet

TOY_DIMS = dict(d_emb=3, hidden=4, proj_dim=4)


def toy_examples(seed, n=4, feat_dim=5, vocab_size=7):
    """Random tiny examples over a 7-token vocabulary (6 reserved + one word)."""
    rng = np.random.default_rng(seed)
    exs = []
    for i in range(n):
        m, c, k = (int(rng.integers(lo, 5)) for lo in (2, 2, 1))
        exs.append(Example(
            f"v{i}:0", f"v{i}", rng.normal(size=(m, feat_dim)),
            [], rng.integers(1, vocab_size, size=c), [], rng.integers(1, vocab_size, size=k),
        ))
    return exs


@pytest.fixture
def toy_vocab():
    return Vocab(["goal"])


@pytest.fixture
def toy_negatives():
    return NegativeSet(video=1, chat=2, response=3)


def write_chat(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")


@pytest.fixture
def fixture_dir():
    return os.path.join(os.path.dirname(__file__), "fixtures")
