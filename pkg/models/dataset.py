"""Pydantic models for kinematic trials, labels, segments and folds."""

from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Optional, List
from enum import Enum
import numpy as np


# Master + slave kinematics as recorded in JIGSAWS
KINEMATIC_DIM = 76


class Task(str, Enum):
    """JIGSAWS surgical tasks."""
    KNOT_TYING = "KnotTying"
    NEEDLE_PASSING = "NeedlePassing"
    SUTURING = "Suturing"

    @property
    def directory(self) -> str:
        """Directory and file-name stem used by the JIGSAWS distribution."""
        return {
            Task.KNOT_TYING: "Knot_Tying",
            Task.NEEDLE_PASSING: "Needle_Passing",
            Task.SUTURING: "Suturing",
        }[self]

    @property
    def code(self) -> str:
        return {
            Task.KNOT_TYING: "KT",
            Task.NEEDLE_PASSING: "NP",
            Task.SUTURING: "SU",
        }[self]

    @classmethod
    def from_directory(cls, name: str) -> "Task":
        for task in cls:
            if task.directory == name:
                return task
        raise ValueError(f"Unknown task directory: {name}")

    @classmethod
    def from_code(cls, code: str) -> "Task":
        for task in cls:
            if task.code == code:
                return task
        raise ValueError(f"Unknown task code: {code}")


class SkillLevel(str, Enum):
    """Self-claimed expertise level (metadata only)."""
    NOVICE = "Novice"
    INTERMEDIATE = "Intermediate"
    EXPERT = "Expert"

    @classmethod
    def from_meta_code(cls, code: str) -> "SkillLevel":
        mapping = {"N": cls.NOVICE, "I": cls.INTERMEDIATE, "E": cls.EXPERT}
        if code not in mapping:
            raise ValueError(f"Unknown skill level code: {code}")
        return mapping[code]


class OsatsCategory(str, Enum):
    """OSATS categories, in the order used by every array and report."""
    TIME_AND_MOTION = "time_and_motion"
    FLOW_OF_OPERATION = "flow_of_operation"
    NEEDLE_HANDLING = "needle_handling"
    RESPECT_FOR_TISSUE = "respect_for_tissue"
    OVERALL_PERFORMANCE = "overall_performance"

    @property
    def index(self) -> int:
        return list(OsatsCategory).index(self)


OSATS_CATEGORIES: List[OsatsCategory] = list(OsatsCategory)
NUM_CATEGORIES = len(OSATS_CATEGORIES)
NUM_CLASSES = 5


class CVScheme(str, Enum):
    """Cross-validation schemes."""
    LOSO = "LOSO"
    LOUO = "LOUO"


class KinematicTrial(BaseModel):
    """One recorded trial.

    ``frames`` is a T x D float64 matrix. Files parsed from JIGSAWS always have
    D = 76; reduced widths are accepted so small synthetic configurations can run
    through the same pipeline.
    """
    trial_id: str = Field(..., min_length=1)
    task: Task
    subject_id: str = Field(..., min_length=1)
    repetition: int = Field(..., ge=1)
    frames: np.ndarray
    self_claimed_level: Optional[SkillLevel] = None

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @field_validator("frames")
    @classmethod
    def check_frames(cls, frames: np.ndarray) -> np.ndarray:
        frames = np.asarray(frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ValueError(f"frames must be a non-empty T x D matrix, got shape {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise ValueError("frames contain non-finite values")
        return frames

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def num_features(self) -> int:
        return int(self.frames.shape[1])

    def with_frames(self, frames: np.ndarray) -> "KinematicTrial":
        """Copy of this trial carrying different frame values."""
        return KinematicTrial(
            trial_id=self.trial_id,
            task=self.task,
            subject_id=self.subject_id,
            repetition=self.repetition,
            frames=frames,
            self_claimed_level=self.self_claimed_level,
        )


class TrialLabels(BaseModel):
    """Five OSATS scores and the updated GRS (their sum)."""
    osats: List[int] = Field(..., min_length=NUM_CATEGORIES, max_length=NUM_CATEGORIES)
    grs: int = Field(..., ge=5, le=25)

    @field_validator("osats")
    @classmethod
    def check_osats(cls, osats: List[int]) -> List[int]:
        for score in osats:
            if not 1 <= score <= NUM_CLASSES:
                raise ValueError(f"OSATS score {score} outside [1, {NUM_CLASSES}]")
        return osats

    @model_validator(mode="after")
    def check_grs(self) -> "TrialLabels":
        if self.grs != sum(self.osats):
            raise ValueError(f"grs {self.grs} does not equal sum of osats {self.osats}")
        return self

    @classmethod
    def from_osats(cls, osats: List[int]) -> "TrialLabels":
        return cls(osats=list(osats), grs=int(sum(osats)))


class Segment(BaseModel):
    """A contiguous window of L frames from one trial (index starts at 1)."""
    values: np.ndarray
    index: int = Field(..., ge=1)
    parent_trial: str

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @field_validator("values")
    @classmethod
    def check_values(cls, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"segment values must be L x D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("segment contains non-finite values")
        return values

    @property
    def length(self) -> int:
        return int(self.values.shape[0])


class FoldSpec(BaseModel):
    """One cross-validation fold."""
    scheme: CVScheme
    fold_key: str
    train_ids: List[str]
    test_ids: List[str]

    @model_validator(mode="after")
    def check_disjoint(self) -> "FoldSpec":
        overlap = set(self.train_ids) & set(self.test_ids)
        if overlap:
            raise ValueError(f"train and test overlap: {sorted(overlap)}")
        return self


class LabelledTrial(BaseModel):
    """A trial joined with its labels."""
    trial: KinematicTrial
    labels: TrialLabels

    class Config:
        arbitrary_types_allowed = True

    @property
    def trial_id(self) -> str:
        return self.trial.trial_id
