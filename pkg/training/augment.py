"""Trial-level augmentation: Gaussian noise and time reversal."""

from typing import List, Sequence
import logging

import numpy as np

from errors import EmptySequenceError, RangeError
from models.dataset import Segment

logger = logging.getLogger(__name__)


def flip(frames: np.ndarray) -> np.ndarray:
    """Reverse frame order."""
    return np.ascontiguousarray(frames[::-1])


def add_gaussian_noise(frames: np.ndarray, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Add zero-mean noise whose per-feature std is ``scale`` times the signal's."""
    std = frames.std(axis=0, keepdims=True)
    return frames + rng.standard_normal(frames.shape) * (scale * std)


def augment_frames(
    frames: np.ndarray,
    rng: np.random.Generator,
    rate: float,
    noise_scale: float = 1.0,
) -> np.ndarray:
    """Noise then flip, each applied independently with probability ``rate``.

    Both coin tosses are always drawn so the generator advances the same way
    whatever the outcome.
    """
    if not 0.0 <= rate <= 1.0:
        raise RangeError(f"augment rate must be in [0, 1], got {rate}")
    apply_noise = rng.random() < rate
    apply_flip = rng.random() < rate
    out = frames
    if apply_noise:
        out = add_gaussian_noise(out, rng, noise_scale)
    if apply_flip:
        out = flip(out)
    return out


def augment(
    segments: Sequence[Segment],
    rng: np.random.Generator,
    rate: float,
    noise_scale: float = 1.0,
) -> List[Segment]:
    """Augment a trial given as its segments.

    The segments are joined back into one signal, augmented as a whole and cut
    again at the same length, so shapes and count are preserved.
    """
    if not segments:
        raise EmptySequenceError("augment needs at least one segment")
    length = segments[0].length
    frames = augment_frames(np.concatenate([s.values for s in segments]), rng, rate, noise_scale)
    return [
        Segment(values=frames[i * length:(i + 1) * length], index=s.index, parent_trial=s.parent_trial)
        for i, s in enumerate(segments)
    ]
