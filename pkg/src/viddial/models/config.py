"""Model and training hyperparameters (defaults follow the reference setup)."""
from dataclasses import asdict, dataclass, fields

from viddial.errors import ConfigError

DISCRIMINATIVE_VARIANTS = ("dual_chat", "dual_video", "triple", "tridaf")
GENERATIVE_VARIANTS = ("seq2seq_chat", "seq2seq_video", "seq2seq_both", "bidaf")


@dataclass
class _Base:
    d_emb: int = 100
    hidden: int = 256
    proj_dim: int = 256
    video_cap: int = 60
    chat_cap: int = 70
    response_cap: int = 10
    margin: float = 0.1
    negatives: int = 3
    init_scale: float = 0.08
    final_mode: str = "concat_finals"

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
        return cls(**d)

    def _check_common(self):
        if self.margin <= 0:
            raise ConfigError("margin must be positive")
        if self.negatives not in (1, 3):
            raise ConfigError("negatives must be 1 or 3")
        for name in ("d_emb", "hidden", "proj_dim", "video_cap", "chat_cap", "response_cap"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


@dataclass
class DiscriminativeConfig(_Base):
    variant: str = "tridaf"
    loss: str = "max_margin"
    layers: int = 1
    share_flow_weights: bool = False

    def __post_init__(self):
        self._check_common()
        if self.variant not in DISCRIMINATIVE_VARIANTS:
            raise ConfigError(f"unknown discriminative variant {self.variant!r}")
        if self.loss not in ("max_margin", "classification"):
            raise ConfigError(f"unknown loss {self.loss!r}")


@dataclass
class GenerativeConfig(_Base):
    variant: str = "bidaf"
    lam: float = 1.0
    max_decode_len: int = 10
    enc_layers: int = 2
    dec_layers: int = 2
    score_norm: str = "sum"

    def __post_init__(self):
        self._check_common()
        if self.variant not in GENERATIVE_VARIANTS:
            raise ConfigError(f"unknown generative variant {self.variant!r}")
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")
        if self.score_norm not in ("sum", "mean"):
            raise ConfigError("score_norm must be 'sum' or 'mean'")


@dataclass
class TrainConfig:
    lr: float = 1e-4
    batch_size: int = 32
    clip_norm: float = 2.0
    epochs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.lr <= 0 or self.clip_norm <= 0:
            raise ConfigError("lr and clip_norm must be positive")
        if self.batch_size <= 0 or self.epochs < 0:
            raise ConfigError("batch_size must be positive and epochs non-negative")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: v for k, v in d.items() if k in {f.name for f in fields(cls)}})
