"""Epoch loop: shuffle, augment, forward, backward, Adam."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence
import logging
import math

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from autodiff import backward, get_tape
from dataset.preprocessing import normalize, segment
from errors import EmptyFoldError, NonFiniteLossError
from models.configs import ModelConfig, TrainConfig
from models.dataset import KinematicTrial, LabelledTrial
from network.checkpoint import save_checkpoint
from network.params import ModelParams, init_model
from network.rtrans import forward_trial
from training.augment import augment_frames
from training.losses import class_weights, compute_loss
from training.optimizer import AdamState, adam_step

logger = logging.getLogger(__name__)

LOSS_LOG_COLUMNS = ["epoch", "loss", "fold"]


class TrainResult(BaseModel):
    """Trained parameters and the per-epoch mean training loss."""
    params: ModelParams
    loss_history: List[float] = Field(default_factory=list)
    fold_key: str = "all"

    class Config:
        arbitrary_types_allowed = True

    def loss_log(self) -> pd.DataFrame:
        return loss_log_frame(self.loss_history, self.fold_key)


def fold_rng(seed: int, fold_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, fold_index])


def loss_log_frame(history: Sequence[float], fold_key: str) -> pd.DataFrame:
    return pd.DataFrame({
        "epoch": np.arange(1, len(history) + 1),
        "loss": np.asarray(history, dtype=np.float64),
        "fold": [fold_key] * len(history),
    }, columns=LOSS_LOG_COLUMNS)


def write_loss_log(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def trial_loss(
    params: ModelParams,
    trial: KinematicTrial,
    labelled: LabelledTrial,
    weights: np.ndarray,
    model_config: ModelConfig,
    train_config: TrainConfig,
    rng: Optional[np.random.Generator] = None,
):
    """Loss of one (already normalized) trial, augmenting when ``rng`` is given."""
    frames = trial.frames
    if rng is not None:
        frames = augment_frames(frames, rng, train_config.augment_rate, train_config.noise_scale)
    segments = segment(trial.with_frames(frames), model_config.segment_length)
    _, avg_logits = forward_trial(params, segments, training=rng is not None)
    return compute_loss(
        avg_logits,
        labelled.labels,
        weights,
        params,
        train_config.lambda_l2,
        smoothing=train_config.label_smoothing,
    )


def train(
    trials: Sequence[LabelledTrial],
    model_config: ModelConfig,
    train_config: TrainConfig,
    fold_key: str = "all",
    fold_index: int = 0,
    checkpoint_path: Optional[Path] = None,
    loss_log_path: Optional[Path] = None,
    params: Optional[ModelParams] = None,
) -> TrainResult:
    """Train on one fold's training trials.

    Each epoch shuffles the trials with the fold generator and walks them in
    mini-batches. Within a batch, trials are processed in trial-id order and
    their gradients summed; the sum is divided by the batch size before the
    Adam step.

    Args:
        trials: Training trials
        model_config: Architecture
        train_config: Optimization settings
        fold_key: Label written to the loss log
        fold_index: Position of the fold, mixed into the generator seed
        checkpoint_path: Where to write the final parameters
        loss_log_path: Where to write the per-epoch loss CSV
        params: Starting parameters (fresh initialization otherwise)

    Returns:
        TrainResult with the trained parameters and loss history
    """
    if not trials:
        raise EmptyFoldError(f"fold {fold_key}: no training trials")

    rng = fold_rng(train_config.seed, fold_index)
    params = params or init_model(model_config)
    weights = class_weights([t.labels for t in trials])
    normalized: Dict[str, KinematicTrial] = {t.trial_id: normalize(t.trial) for t in trials}
    for trial in normalized.values():
        # fail early on trials shorter than one segment
        segment(trial, model_config.segment_length)
    state = AdamState.for_params(params, train_config)

    logger.info(
        f"Fold {fold_key}: training on {len(trials)} trials for {train_config.epochs} epochs "
        f"(batch {train_config.batch_size}, lr {train_config.learning_rate:g})"
    )

    history: List[float] = []
    get_tape().clear()
    for epoch in range(1, train_config.epochs + 1):
        order = rng.permutation(len(trials))
        epoch_losses = []
        for start in range(0, len(order), train_config.batch_size):
            batch = sorted((trials[i] for i in order[start:start + train_config.batch_size]), key=lambda t: t.trial_id)
            params.zero_grad()
            for labelled in batch:
                loss = trial_loss(
                    params, normalized[labelled.trial_id], labelled, weights,
                    model_config, train_config, rng=rng,
                )
                value = loss.item()
                if not math.isfinite(value):
                    get_tape().clear()
                    raise NonFiniteLossError(
                        f"fold {fold_key}, epoch {epoch}: loss {value} on trial {labelled.trial_id}"
                    )
                backward(loss)
                epoch_losses.append(value)

            grads = {
                name: (t.grad if t.grad is not None else np.zeros_like(t.values)) / len(batch)
                for name, t in params.named_parameters()
            }
            adam_step(params, grads, state, train_config.learning_rate)

        history.append(float(np.mean(epoch_losses)))
        if epoch == 1 or epoch % train_config.log_every == 0 or epoch == train_config.epochs:
            logger.info(f"Fold {fold_key}: epoch {epoch}/{train_config.epochs} loss {history[-1]:.6f}")

    params.zero_grad()
    result = TrainResult(params=params, loss_history=history, fold_key=fold_key)
    if loss_log_path is not None:
        write_loss_log(result.loss_log(), loss_log_path)
    if checkpoint_path is not None:
        save_checkpoint(params, checkpoint_path, train_config)
    return result
