"""Rank correlation and score aggregation."""

from typing import Optional, Sequence
import math

import numpy as np
from scipy.stats import rankdata

from errors import RangeError, ShapeMismatchError, UndefinedCorrelationError
from models.dataset import NUM_CATEGORIES


def spearman(pred: Sequence[float], truth: Sequence[float]) -> float:
    """Spearman's rho: Pearson correlation of average (fractional) ranks.

    Without ties this equals 1 - 6 * sum(d^2) / (n (n^2 - 1)).

    Raises:
        UndefinedCorrelationError: fewer than two pairs, or a constant ranking
    """
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ShapeMismatchError("spearman", pred.shape, truth.shape)
    if pred.size < 2:
        raise UndefinedCorrelationError(f"spearman needs at least 2 pairs, got {pred.size}")

    dx = rankdata(pred, method="average")
    dy = rankdata(truth, method="average")
    dx -= dx.mean()
    dy -= dy.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("spearman undefined for a constant ranking")
    rho = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, rho))


def try_spearman(pred: Sequence[float], truth: Sequence[float]) -> Optional[float]:
    """``spearman`` with undefined correlations mapped to None."""
    try:
        return spearman(pred, truth)
    except UndefinedCorrelationError:
        return None


def aggregate_grs(osats: Sequence[float]) -> float:
    """GRS as the sum of the five OSATS scores."""
    if len(osats) != NUM_CATEGORIES:
        raise RangeError(f"expected {NUM_CATEGORIES} OSATS scores, got {len(osats)}")
    for score in osats:
        if not 1.0 <= score <= 5.0:
            raise RangeError(f"OSATS score {score} outside [1, 5]")
    return float(sum(osats))


def mean_defined(values: Sequence[Optional[float]]) -> Optional[float]:
    """Mean of the non-None values; None when there are none."""
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None
