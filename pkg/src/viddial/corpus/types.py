"""Record types for chat logs, video segments and dialogue triples."""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from viddial.errors import ConfigError

BLEU_MATCH = "bleu_match"
FALLBACK_FIRST = "fallback_first"


@dataclass(frozen=True)
class Utterance:
    speaker: str
    time: float
    tokens: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    @property
    def text(self):
        return " ".join(self.tokens)


@dataclass
class VideoSegment:
    """Frame features for one context window; ``rows`` indexes the source file."""

    frames: np.ndarray
    start: float
    end: float
    features_path: Optional[str] = None
    rows: Tuple[int, int] = (0, 0)

    @property
    def num_frames(self):
        return self.frames.shape[0]


@dataclass
class DialogueTriple:
    video: VideoSegment
    chat: List[Utterance]
    response: Tuple[str, ...]
    selection_reason: str
    window_index: int
    video_id: str = ""
    context_interval: Tuple[float, float] = (0.0, 0.0)
    response_interval: Tuple[float, float] = (0.0, 0.0)
    # every utterance left in the response window; the multi-reference set
    response_window: List[Tuple[str, ...]] = field(default_factory=list)

    @property
    def instance_id(self):
        return f"{self.video_id}:{self.window_index}"


@dataclass(frozen=True)
class PipelineConfig:
    context_secs: float = 20.0
    response_secs: float = 10.0
    bleu_threshold: float = 0.5
    n_frequent: int = 20
    min_context_utts: int = 4
    fps: float = 3.0
    max_video_steps: int = 60
    bleu_smoothing: str = "add-one"

    def __post_init__(self):
        for name in ("context_secs", "response_secs", "bleu_threshold", "n_frequent",
                     "min_context_utts", "fps", "max_video_steps"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.response_secs > self.context_secs:
            raise ConfigError("response_secs must not exceed context_secs")
        if self.bleu_smoothing not in ("add-one", "none"):
            raise ConfigError(f"bleu_smoothing must be 'add-one' or 'none', got {self.bleu_smoothing!r}")

    @classmethod
    def from_dict(cls, d):
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)
