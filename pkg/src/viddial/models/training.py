"""Mini-batch training with Adam and global-norm clipping."""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Callable, List, Optional

from viddial.errors import ContractError, NumericError
from viddial.models.config import TrainConfig
from viddial.models.negatives import sample_negatives
from viddial.numerics import Adam, clip_grad_norm, substream

logger = logging.getLogger(__name__)


@dataclass
class TrainResult:
    loss_trace: List[float] = field(default_factory=list)
    selection_scores: List[float] = field(default_factory=list)
    best_epoch: Optional[int] = None
    steps: int = 0


def train(examples, model, tcfg: TrainConfig, *, select: Callable = None, checkpoint_dir=None,
          on_epoch: Callable = None, use_negatives=True):
    """Fit ``model`` on ``examples``.

    Each epoch visits the examples in a seeded shuffled order, samples fresh
    negatives for every positive, averages the per-example losses over a
    mini-batch, clips the global gradient norm and takes one Adam step.

    Args:
        select: optional ``model -> float`` validation score (higher is
            better); the best epoch's parameters are restored at the end.
        checkpoint_dir: write ``epoch_NNN.ckpt`` there after every epoch.
        use_negatives: set ``False`` for objectives without negatives
            (e.g. cross-entropy-only generators).
    """
    if not examples:
        raise ContractError("cannot train on an empty dataset")
    from viddial.models.checkpoint import save_checkpoint

    store = model.store
    opt = Adam(store, lr=tcfg.lr)
    result = TrainResult()
    best_score, best_state = -math.inf, None
    needs_neg = use_negatives and _needs_negatives(model)
    for epoch in range(tcfg.epochs):
        order = substream(tcfg.seed, f"shuffle/{epoch}").permutation(len(examples))
        neg_rng = substream(tcfg.seed, f"negatives/{epoch}")
        total = 0.0
        for start in range(0, len(order), tcfg.batch_size):
            batch = order[start:start + tcfg.batch_size]
            for i in batch:
                neg = sample_negatives(int(i), examples, "train", rng=neg_rng) if needs_neg else None
                loss = model.example_loss(examples[i], neg, examples)
                value = float(loss.data)
                if not math.isfinite(value):
                    raise NumericError(f"non-finite loss {value} at epoch {epoch} example {examples[i].instance_id}")
                total += value
                (loss * (1.0 / len(batch))).backward()
            clip_grad_norm(store, tcfg.clip_norm)
            opt.step()
            result.steps += 1
        mean_loss = total / len(examples)
        result.loss_trace.append(mean_loss)
        logger.info("epoch %d loss %.6f", epoch, mean_loss)
        if select is not None:
            score = float(select(model))
            result.selection_scores.append(score)
            if score > best_score:
                best_score, best_state, result.best_epoch = score, store.state_dict(), epoch
        if checkpoint_dir is not None:
            os.makedirs(checkpoint_dir, exist_ok=True)
            save_checkpoint(model, os.path.join(checkpoint_dir, f"epoch_{epoch:03d}.ckpt"))
        if on_epoch is not None:
            on_epoch(epoch, mean_loss, model)
    if best_state is not None:
        store.load_state_dict(best_state)
    return result


def _needs_negatives(model):
    if model.kind == "generative":
        return model.cfg.lam > 0
    return model.kind == "discriminative"


def evaluate_loss(examples, model, seed=0, use_negatives=True):
    """Mean example loss with seeded negatives and no parameter update."""
    from viddial.numerics import no_grad

    rng = substream(seed, "eval-loss")
    needs_neg = use_negatives and _needs_negatives(model)
    total = 0.0
    with no_grad():
        for i, ex in enumerate(examples):
            neg = sample_negatives(i, examples, "train", rng=rng) if needs_neg else None
            total += float(model.example_loss(ex, neg, examples).data)
    return total / len(examples)
