"""Augmentation, objective, optimizer and epoch loop."""

from .augment import augment, augment_frames, add_gaussian_noise, flip
from .losses import smooth_labels, class_weights, compute_loss
from .optimizer import AdamState, adam_step
from .trainer import TrainResult, train, write_loss_log

__all__ = [
    "augment",
    "augment_frames",
    "add_gaussian_noise",
    "flip",
    "smooth_labels",
    "class_weights",
    "compute_loss",
    "AdamState",
    "adam_step",
    "TrainResult",
    "train",
    "write_loss_log",
]
