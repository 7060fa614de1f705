"""Pydantic models for recurrent state, trial predictions and cross-validation results."""

from pydantic import BaseModel, Field, model_validator
from typing import Optional, List, Literal, Dict, Any
import numpy as np

from autodiff import Tensor
from models.dataset import CVScheme, NUM_CATEGORIES, NUM_CLASSES


class HiddenState(BaseModel):
    """Recurrent state z_s (L x D). Index 0 is the zero state."""
    z: Tensor
    segment_index: int = Field(..., ge=0)

    class Config:
        arbitrary_types_allowed = True


class TrialPrediction(BaseModel):
    """Trial-level prediction built from segment-level class probabilities."""
    trial_id: str
    segment_probabilities: np.ndarray  # S x categories x classes
    final_osats: List[int]
    expected_osats: List[float]
    grs: float
    segment_length: int = Field(..., ge=1)
    grs_representation: Literal["expected", "argmax"] = "expected"

    class Config:
        arbitrary_types_allowed = True

    @model_validator(mode="after")
    def check_consistency(self) -> "TrialPrediction":
        probs = self.segment_probabilities
        if probs.ndim != 3 or probs.shape[1:] != (NUM_CATEGORIES, NUM_CLASSES) or probs.shape[0] < 1:
            raise ValueError(f"segment probabilities must be S x {NUM_CATEGORIES} x {NUM_CLASSES}, got {probs.shape}")
        averaged = probs.mean(axis=0)
        expected_final = [int(k) + 1 for k in np.argmax(averaged, axis=1)]
        if expected_final != list(self.final_osats):
            raise ValueError("final osats do not match the argmax of averaged probabilities")
        return self

    @property
    def num_segments(self) -> int:
        return int(self.segment_probabilities.shape[0])

    @property
    def segment_scores(self) -> np.ndarray:
        """Per-segment argmax scores in [1, 5], shape S x categories."""
        return np.argmax(self.segment_probabilities, axis=2) + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trial_id": self.trial_id,
            "final_osats": list(self.final_osats),
            "expected_osats": [float(v) for v in self.expected_osats],
            "grs": float(self.grs),
            "grs_representation": self.grs_representation,
            "segment_length": self.segment_length,
            "segment_scores": self.segment_scores.tolist(),
        }


class TrialOutcome(BaseModel):
    """Predicted against ground-truth scores for one test trial."""
    trial_id: str
    predicted_grs: float
    true_grs: int
    predicted_osats: List[float]
    true_osats: List[int]


class FoldResult(BaseModel):
    """Spearman correlations for one fold; None marks an undefined correlation."""
    fold_key: str
    scc_grs: Optional[float] = Field(None, ge=-1.0, le=1.0)
    scc_per_osats: List[Optional[float]] = Field(default_factory=list)
    n_test: int = Field(..., ge=0)
    outcomes: List[TrialOutcome] = Field(default_factory=list)

    @property
    def grs_undefined(self) -> bool:
        return self.scc_grs is None


class CVSummary(BaseModel):
    """Fold results of one task selection and scheme, averaged across folds."""
    task: str
    scheme: CVScheme
    folds: List[FoldResult]
    mean_scc_grs: Optional[float] = None
    mean_scc_per_osats: List[Optional[float]] = Field(default_factory=list)
    mean_scc_osats: Optional[float] = None
    undefined_folds: int = 0
