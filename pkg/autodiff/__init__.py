"""Reverse-mode differentiation engine for R-Trans."""

from .tensor import (
    Tensor,
    Tape,
    backward,
    get_tape,
    is_grad_enabled,
    no_grad,
    set_anomaly_detection,
)
from . import functional
from .gradcheck import finite_difference_check

__all__ = [
    "Tensor",
    "Tape",
    "backward",
    "get_tape",
    "is_grad_enabled",
    "no_grad",
    "set_anomaly_detection",
    "functional",
    "finite_difference_check",
]
