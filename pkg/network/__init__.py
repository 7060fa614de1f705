"""R-Trans parameters, layers, forward pass and checkpoints."""

from .params import ModelParams, init_model, count_parameters
from .rtrans import (
    fusion_forward,
    heads_forward,
    forward_trial,
    encode_segments,
    zero_state,
)
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "ModelParams",
    "init_model",
    "count_parameters",
    "fusion_forward",
    "heads_forward",
    "forward_trial",
    "encode_segments",
    "zero_state",
    "save_checkpoint",
    "load_checkpoint",
]
