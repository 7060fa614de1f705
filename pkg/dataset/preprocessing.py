"""Per-trial normalization and fixed-length segmentation."""

from typing import List
import logging

import numpy as np

from errors import DegenerateTrialError, RangeError, TooShortError
from models.dataset import KinematicTrial, Segment

logger = logging.getLogger(__name__)

STD_EPS = 1e-8
SWEEP_TOLERANCE = 1e-10
DEFAULT_MAX_SWEEPS = 100


def _standardize(x: np.ndarray, axis: int, eps: float) -> np.ndarray:
    """z-score along ``axis``; slices with std below ``eps`` map to zero."""
    mu = x.mean(axis=axis, keepdims=True)
    sd = x.std(axis=axis, keepdims=True)
    flat = sd < eps
    return np.where(flat, 0.0, (x - mu) / np.where(flat, 1.0, sd))


def normalize_frames(
    frames: np.ndarray,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    eps: float = STD_EPS,
    tol: float = SWEEP_TOLERANCE,
) -> np.ndarray:
    """Standardize over time (per feature) and then over features (per frame).

    One sweep is the two-step pass. Further sweeps repeat it until the result
    stops changing by more than ``tol``.
    """
    if frames.shape[0] < 2:
        raise DegenerateTrialError(f"normalization needs at least 2 frames, got {frames.shape[0]}")
    if max_sweeps < 1:
        raise RangeError(f"max_sweeps must be >= 1, got {max_sweeps}")

    y = np.asarray(frames, dtype=np.float64)
    for sweep in range(1, max_sweeps + 1):
        nxt = _standardize(_standardize(y, axis=0, eps=eps), axis=1, eps=eps)
        delta = float(np.max(np.abs(nxt - y)))
        y = nxt
        if delta < tol:
            break
    else:
        if max_sweeps > 1:
            logger.warning(f"Normalization did not converge in {max_sweeps} sweeps (last change {delta:.2e})")
    return y


def normalize(trial: KinematicTrial, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> KinematicTrial:
    """Trial with z-scored frames; see ``normalize_frames``."""
    try:
        frames = normalize_frames(trial.frames, max_sweeps=max_sweeps)
    except DegenerateTrialError as e:
        raise DegenerateTrialError(f"{trial.trial_id}: {e}")
    return trial.with_frames(frames)


def segment(trial: KinematicTrial, L: int) -> List[Segment]:
    """Split into floor(T / L) contiguous segments; the remainder is dropped."""
    if L < 1:
        raise RangeError(f"segment length must be >= 1, got {L}")
    if trial.num_frames < L:
        raise TooShortError(f"{trial.trial_id}: {trial.num_frames} frames is shorter than one segment of {L}")

    count = trial.num_frames // L
    return [
        Segment(
            values=trial.frames[i * L:(i + 1) * L].copy(),
            index=i + 1,
            parent_trial=trial.trial_id,
        )
        for i in range(count)
    ]


def prepare_trial(
    trial: KinematicTrial,
    L: int,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    normalized: bool = False,
) -> List[Segment]:
    """Normalize (unless already ``normalized``) and segment one trial."""
    if not normalized:
        trial = normalize(trial, max_sweeps=max_sweeps)
    return segment(trial, L)
