"""Response models, losses, negative sampling and training."""
from viddial.encoders import Vocab
from viddial.errors import ConfigError
from viddial.models.config import (
    DISCRIMINATIVE_VARIANTS,
    GENERATIVE_VARIANTS,
    DiscriminativeConfig,
    GenerativeConfig,
    TrainConfig,
)
from viddial.models.data import Example, featurize
from viddial.models.discriminative import DiscriminativeModel
from viddial.models.generative import GenerativeModel
from viddial.models.losses import (
    classification_loss,
    generative_max_margin,
    joint_loss,
    max_margin_loss,
)
from viddial.models.negatives import CandidateList, NegativeSet, build_eval_lists, sample_negatives
from viddial.models.training import TrainResult, evaluate_loss, train

MODEL_NAMES = DISCRIMINATIVE_VARIANTS + GENERATIVE_VARIANTS + ("lm",)


def build_model(name, vocab, feat_dim, overrides=None, seed=0, embedding=None):
    """Instantiate a model by its registry name with optional config overrides.

    ``embedding`` is adopted, not copied: two models built from one tensor
    train the same table.
    """
    overrides = dict(overrides or {})
    if name in DISCRIMINATIVE_VARIANTS:
        return DiscriminativeModel(DiscriminativeConfig(variant=name, **overrides), vocab, feat_dim, seed, embedding)
    if name in GENERATIVE_VARIANTS:
        return GenerativeModel(GenerativeConfig(variant=name, **overrides), vocab, feat_dim, seed, embedding)
    if name == "lm":
        from viddial.baselines import LanguageModel, LmConfig

        return LanguageModel(LmConfig(**overrides), vocab, seed)
    raise ConfigError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")


def model_from_meta(meta):
    cfg = dict(meta["config"])
    name = meta["model"]
    cfg.pop("variant", None)
    return build_model(name, Vocab(meta["vocab"][6:]), meta.get("feat_dim"), cfg, meta.get("seed", 0))


__all__ = [
    "CandidateList", "DiscriminativeConfig", "DiscriminativeModel", "Example", "GenerativeConfig",
    "GenerativeModel", "MODEL_NAMES", "NegativeSet", "TrainConfig", "TrainResult", "build_eval_lists",
    "build_model", "classification_loss", "evaluate_loss", "featurize", "generative_max_margin",
    "joint_loss", "max_margin_loss", "model_from_meta", "sample_negatives", "train",
]
