"""Qualitative feedback timelines and the rater-validation protocol."""

from .bands import categorize
from .descriptors import load_descriptors, describe
from .timeline import build_timeline, write_timeline
from .rater_validation import (
    perturb_predictions,
    blinded_copy,
    binomial_test_one_tailed,
    agreement_summary,
    compare_conditions,
)

__all__ = [
    "categorize",
    "load_descriptors",
    "describe",
    "build_timeline",
    "write_timeline",
    "perturb_predictions",
    "blinded_copy",
    "binomial_test_one_tailed",
    "agreement_summary",
    "compare_conditions",
]
