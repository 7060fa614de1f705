"""Prediction, rank correlation, cross-validation and comparison tables."""

from .metrics import spearman, aggregate_grs
from .predict import predict_trial
from .cross_validation import FoldTrainer, run_cv
from .reports import report_tables, write_results

__all__ = [
    "spearman",
    "aggregate_grs",
    "predict_trial",
    "FoldTrainer",
    "run_cv",
    "report_tables",
    "write_results",
]
