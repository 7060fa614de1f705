"""Label smoothing, class weights and the training objective."""

from typing import Iterable, Sequence, Union
import logging

import numpy as np

from autodiff import Tensor
from autodiff import functional as F
from errors import EmptyFoldError, RangeError, ShapeMismatchError
from models.dataset import NUM_CATEGORIES, NUM_CLASSES, TrialLabels
from network.params import ModelParams

logger = logging.getLogger(__name__)


def smooth_labels(y: int, smoothing: float, num_classes: int = NUM_CLASSES) -> np.ndarray:
    """Target distribution for score ``y`` (1-based).

    The true class keeps 1 - smoothing; the rest is spread evenly over the
    other classes.
    """
    if not 0.0 <= smoothing < 1.0:
        raise RangeError(f"label smoothing must be in [0, 1), got {smoothing}")
    if not 1 <= y <= num_classes:
        raise RangeError(f"score {y} outside [1, {num_classes}]")
    target = np.full(num_classes, smoothing / (num_classes - 1))
    target[y - 1] = 1.0 - smoothing
    return target


def soft_targets(labels: TrialLabels, smoothing: float) -> np.ndarray:
    """categories x classes matrix of smoothed targets."""
    return np.stack([smooth_labels(y, smoothing) for y in labels.osats])


def class_weights(train_labels: Sequence[TrialLabels]) -> np.ndarray:
    """Inverse-frequency weights per category: total / (classes * count_k).

    Classes absent from the fold take the largest weight of the present ones.

    Returns:
        categories x classes matrix
    """
    if not train_labels:
        raise EmptyFoldError("class weights need at least one training trial")

    scores = np.array([labels.osats for labels in train_labels])  # N x categories
    total = scores.shape[0]
    weights = np.zeros((NUM_CATEGORIES, NUM_CLASSES))
    for n in range(NUM_CATEGORIES):
        counts = np.bincount(scores[:, n] - 1, minlength=NUM_CLASSES).astype(np.float64)
        present = counts > 0
        weights[n, present] = total / (NUM_CLASSES * counts[present])
        weights[n, ~present] = weights[n, present].max()
    return weights


def l2_penalty(parameters: Iterable[Tensor]) -> Tensor:
    terms = [F.sum_squares(p) for p in parameters]
    total = terms[0]
    for term in terms[1:]:
        total = F.add(total, term)
    return total


def compute_loss(
    avg_logits: Tensor,
    labels: TrialLabels,
    weights: np.ndarray,
    params: Union[ModelParams, Sequence[Tensor]],
    lambda_l2: float,
    smoothing: float = 0.0,
) -> Tensor:
    """Sum over categories of weighted, smoothed cross-entropy, plus lambda * L2.

    Args:
        avg_logits: Segment-averaged logits, categories x classes
        labels: Ground-truth scores
        weights: Class weights, categories x classes
        params: Parameters entering the L2 term
        lambda_l2: Regularization strength
        smoothing: Label smoothing

    Returns:
        Scalar loss tensor
    """
    expected = (NUM_CATEGORIES, NUM_CLASSES)
    if avg_logits.shape != expected:
        raise ShapeMismatchError("loss logits", avg_logits.shape, expected)
    if weights.shape != expected:
        raise ShapeMismatchError("loss weights", weights.shape, expected)

    # cross-entropy: -sum_k w_k q_k log p_k
    coefficients = -weights * soft_targets(labels, smoothing)
    loss = F.sum(F.mul(F.log_softmax(avg_logits, axis=-1), coefficients))

    if lambda_l2 > 0.0:
        parameters = params.parameters() if isinstance(params, ModelParams) else list(params)
        loss = F.add(loss, F.scale(l2_penalty(parameters), lambda_l2))
    return loss
