"""Featurized training/evaluation examples."""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from viddial.encoders import Vocab, concat_chat_context, truncate_last


@dataclass
class Example:
    instance_id: str
    video_id: str
    frames: np.ndarray
    chat_tokens: List[str]
    chat_ids: np.ndarray
    response_tokens: List[str]
    response_ids: np.ndarray
    references: List[Tuple[str, ...]] = field(default_factory=list)


def featurize(triples, vocab: Vocab, video_cap=60, chat_cap=70, response_cap=10):
    out = []
    for t in triples:
        chat = concat_chat_context(t.chat, chat_cap)
        resp = truncate_last(list(t.response), response_cap)
        refs = list(t.response_window) or [tuple(t.response)]
        out.append(
            Example(
                instance_id=t.instance_id,
                video_id=t.video_id,
                frames=truncate_last(np.asarray(t.video.frames, dtype=np.float64), video_cap),
                chat_tokens=chat,
                chat_ids=vocab.encode(chat),
                response_tokens=resp,
                response_ids=vocab.encode(resp),
                references=refs,
            )
        )
    return out
