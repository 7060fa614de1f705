"""Pydantic models for R-Trans."""

from .dataset import (
    KINEMATIC_DIM,
    NUM_CATEGORIES,
    NUM_CLASSES,
    OSATS_CATEGORIES,
    Task,
    SkillLevel,
    OsatsCategory,
    CVScheme,
    KinematicTrial,
    TrialLabels,
    Segment,
    FoldSpec,
    LabelledTrial,
)

from .configs import (
    TaskSelection,
    ModelConfig,
    TrainConfig,
    RunConfig,
    build_model_config,
    build_train_config,
)

from .predictions import (
    HiddenState,
    TrialPrediction,
    TrialOutcome,
    FoldResult,
    CVSummary,
)

from .feedback import (
    Band,
    FeedbackEntry,
    PerturbationRecord,
    FeedbackTimeline,
    DescriptorTable,
    RaterCondition,
    RaterResponse,
    AgreementSummary,
    BinomialComparison,
)

__all__ = [
    # Dataset
    "KINEMATIC_DIM",
    "NUM_CATEGORIES",
    "NUM_CLASSES",
    "OSATS_CATEGORIES",
    "Task",
    "SkillLevel",
    "OsatsCategory",
    "CVScheme",
    "KinematicTrial",
    "TrialLabels",
    "Segment",
    "FoldSpec",
    "LabelledTrial",
    # Configs
    "TaskSelection",
    "ModelConfig",
    "TrainConfig",
    "RunConfig",
    "build_model_config",
    "build_train_config",
    # Predictions
    "HiddenState",
    "TrialPrediction",
    "TrialOutcome",
    "FoldResult",
    "CVSummary",
    # Feedback
    "Band",
    "FeedbackEntry",
    "PerturbationRecord",
    "FeedbackTimeline",
    "DescriptorTable",
    "RaterCondition",
    "RaterResponse",
    "AgreementSummary",
    "BinomialComparison",
]
