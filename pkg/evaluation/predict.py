"""Eval-mode trial prediction."""

from typing import Literal

import numpy as np

from autodiff import no_grad
from autodiff import functional as F
from dataset.preprocessing import prepare_trial
from evaluation.metrics import aggregate_grs
from models.dataset import KinematicTrial, LabelledTrial
from models.predictions import TrialPrediction
from network.params import ModelParams
from network.rtrans import forward_trial

CLASS_SCORES = np.arange(1, 6, dtype=np.float64)


def prediction_from_probabilities(
    trial_id: str,
    segment_probabilities: np.ndarray,
    segment_length: int,
    grs_representation: Literal["expected", "argmax"] = "expected",
) -> TrialPrediction:
    """Build a TrialPrediction from S x categories x classes probabilities."""
    averaged = segment_probabilities.mean(axis=0)
    final = [int(k) + 1 for k in np.argmax(averaged, axis=1)]
    # convex combinations of 1..5, clipped against rounding
    expected = np.clip(averaged @ CLASS_SCORES, 1.0, 5.0).tolist()
    grs = aggregate_grs(expected) if grs_representation == "expected" else aggregate_grs(final)
    return TrialPrediction(
        trial_id=trial_id,
        segment_probabilities=segment_probabilities,
        final_osats=final,
        expected_osats=expected,
        grs=grs,
        segment_length=segment_length,
        grs_representation=grs_representation,
    )


def predict_trial(
    params: ModelParams,
    trial: KinematicTrial,
    grs_representation: Literal["expected", "argmax"] = "expected",
) -> TrialPrediction:
    """Normalize, segment and score one trial without touching the parameters."""
    L = params.config.segment_length
    segments = prepare_trial(trial, L)
    with no_grad():
        segment_logits, _ = forward_trial(params, segments, training=False)
        probabilities = F.softmax(segment_logits, axis=-1).values
    return prediction_from_probabilities(trial.trial_id, probabilities, L, grs_representation)


def predict_labelled(
    params: ModelParams,
    labelled: LabelledTrial,
    grs_representation: Literal["expected", "argmax"] = "expected",
) -> TrialPrediction:
    return predict_trial(params, labelled.trial, grs_representation)
