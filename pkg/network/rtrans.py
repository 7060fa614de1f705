"""Recurrent transformer: fusion backbone over segments, per-category heads."""

from typing import List, Sequence, Tuple, Union
import logging

import numpy as np

from autodiff import Tensor
from autodiff import functional as F
from errors import EmptySequenceError, ShapeMismatchError
from models.dataset import Segment
from models.predictions import HiddenState
from network.layers import classification_head, fusion_module
from network.params import ModelParams

logger = logging.getLogger(__name__)

# Output of this fusion module (0-based) receives the segment as a residual
RESIDUAL_MODULE = 1


def zero_state(params: ModelParams) -> HiddenState:
    config = params.config
    return HiddenState(z=Tensor(np.zeros((config.segment_length, config.input_dim))), segment_index=0)


def _as_segment_tensor(params: ModelParams, x: Union[Segment, Tensor, np.ndarray]) -> Tensor:
    values = x.values if isinstance(x, (Segment, Tensor)) else np.asarray(x)
    expected = (params.config.segment_length, params.config.input_dim)
    if values.shape != expected:
        raise ShapeMismatchError("segment", values.shape, expected)
    return x if isinstance(x, Tensor) else Tensor(values)


def backbone(params: ModelParams, z_prev: Tensor, x: Tensor) -> Tensor:
    """h(x_s, z_{s-1}) on tensors."""
    y = x
    for i in range(params.config.num_fusion_modules):
        y = fusion_module(params, i, y, z_prev)
        if i == RESIDUAL_MODULE:
            y = F.add(y, x)
    return y


def fusion_forward(params: ModelParams, z_prev: HiddenState, x_s: Union[Segment, Tensor]) -> HiddenState:
    """Advance the recurrence by one segment.

    Args:
        params: Model parameters
        z_prev: State after the previous segment (zeros before the first)
        x_s: Current segment, L x D

    Returns:
        The next state, L x D
    """
    expected = (params.config.segment_length, params.config.input_dim)
    if z_prev.z.shape != expected:
        raise ShapeMismatchError("hidden state", z_prev.z.shape, expected)
    x = _as_segment_tensor(params, x_s)
    return HiddenState(z=backbone(params, z_prev.z, x), segment_index=z_prev.segment_index + 1)


def pool(z: Tensor) -> Tensor:
    """Mean over the frame axis: (..., L, D) -> (..., D)."""
    return F.mean(z, axis=-2)


def heads_logits(params: ModelParams, pooled: Tensor, training: bool = False) -> Tensor:
    """Logits of every head for a batch of pooled states: (S, D) -> (S, categories, classes)."""
    if pooled.ndim != 2 or pooled.shape[1] != params.config.input_dim:
        raise ShapeMismatchError("heads", pooled.shape, (None, params.config.input_dim))
    per_category = [
        classification_head(params, n, pooled, training)
        for n in range(params.config.num_categories)
    ]
    return F.stack(per_category, axis=1)


def heads_forward(params: ModelParams, z_s: HiddenState, training: bool = False) -> Tensor:
    """Per-category logits (categories x classes) of one hidden state."""
    expected = (params.config.segment_length, params.config.input_dim)
    if z_s.z.shape != expected:
        raise ShapeMismatchError("hidden state", z_s.z.shape, expected)
    pooled = F.reshape(pool(z_s.z), (1, params.config.input_dim))
    return F.reshape(heads_logits(params, pooled, training), (params.config.num_categories, params.config.num_classes))


def average_segments(params: ModelParams, segment_logits: Tensor) -> Tensor:
    """Combine S x categories x classes logits into categories x classes.

    ``logits`` mode returns the mean logits. ``probabilities`` mode returns the
    log of the mean softmax, which a log-softmax leaves unchanged.
    """
    if params.config.average == "probabilities":
        return F.log(F.mean(F.softmax(segment_logits, axis=-1), axis=0))
    return F.mean(segment_logits, axis=0)


def encode_segments(params: ModelParams, segments: Sequence[Union[Segment, Tensor]]) -> List[HiddenState]:
    """Run the recurrence over ``segments`` and return z_1..z_S."""
    if not segments:
        raise EmptySequenceError("forward_trial needs at least one segment")
    state = zero_state(params)
    states = []
    for x in segments:
        state = fusion_forward(params, state, x)
        states.append(state)
    return states


def forward_trial(
    params: ModelParams,
    segments: Sequence[Union[Segment, Tensor]],
    training: bool = False,
) -> Tuple[Tensor, Tensor]:
    """Score every segment of a trial.

    Args:
        params: Model parameters
        segments: The trial's segments in order
        training: Refresh the heads' running statistics from this trial

    Returns:
        (per-segment logits S x categories x classes, averaged categories x classes)
    """
    states = encode_segments(params, segments)
    pooled = F.stack([pool(s.z) for s in states], axis=0)
    segment_logits = heads_logits(params, pooled, training)
    return segment_logits, average_segments(params, segment_logits)
