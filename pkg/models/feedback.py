"""Pydantic models for the qualitative feedback timeline."""

from pydantic import BaseModel, Field, model_validator
from typing import List, Dict, Optional, Tuple
from enum import Enum

from models.dataset import OsatsCategory


class Band(str, Enum):
    """Three-way qualitative grouping of an OSATS score."""
    POOR = "poor"
    AVERAGE = "average"
    GOOD = "good"


class FeedbackEntry(BaseModel):
    """Score, band and descriptor for one segment and one category."""
    segment: int = Field(..., ge=1)
    start_frame: int = Field(..., ge=0)
    end_frame: int = Field(..., ge=1)
    category: OsatsCategory
    score: int = Field(..., ge=1, le=5)
    band: Band
    descriptor: str
    perturbed: bool = False


class PerturbationRecord(BaseModel):
    """One band replaced for blinding; kept for unblinding."""
    segment: int
    category: OsatsCategory
    original_band: Band
    shown_band: Band


class FeedbackTimeline(BaseModel):
    """Per-segment feedback for one trial."""
    trial_id: str
    segment_length: int = Field(..., ge=1)
    headline_category: OsatsCategory = OsatsCategory.OVERALL_PERFORMANCE
    entries: List[FeedbackEntry]
    perturbation_log: List[PerturbationRecord] = Field(default_factory=list)

    @property
    def num_segments(self) -> int:
        return len({entry.segment for entry in self.entries})

    def entries_for(self, category: OsatsCategory) -> List[FeedbackEntry]:
        return sorted(
            (e for e in self.entries if e.category == category),
            key=lambda e: e.segment,
        )

    def headline_series(self) -> List[Band]:
        return [e.band for e in self.entries_for(self.headline_category)]


class DescriptorTable(BaseModel):
    """Qualitative anchor text per (category, band)."""
    entries: Dict[Tuple[OsatsCategory, Band], str]

    @model_validator(mode="after")
    def check_entries(self) -> "DescriptorTable":
        for key, text in self.entries.items():
            if not text.strip():
                raise ValueError(f"empty descriptor for {key}")
        return self

    @property
    def is_complete(self) -> bool:
        return all(
            (category, band) in self.entries
            for category in OsatsCategory
            for band in Band
        )


class RaterCondition(str, Enum):
    """What a rater was shown: the model's bands or randomly generated ones."""
    MODEL = "model"
    NOISE = "noise"


class RaterResponse(BaseModel):
    """One rater judgement on one displayed segment band."""
    trial_id: str
    segment: int = Field(..., ge=1)
    condition: RaterCondition
    agreed: bool


class AgreementSummary(BaseModel):
    """Agreement counts per condition."""
    model_agreed: int = Field(..., ge=0)
    model_total: int = Field(..., ge=0)
    noise_agreed: int = Field(..., ge=0)
    noise_total: int = Field(..., ge=0)

    @property
    def model_rate(self) -> Optional[float]:
        return self.model_agreed / self.model_total if self.model_total else None

    @property
    def noise_rate(self) -> Optional[float]:
        return self.noise_agreed / self.noise_total if self.noise_total else None


class BinomialComparison(BaseModel):
    """One-tailed test of model-condition agreement against the noise rate."""
    k: int
    n: int
    p0: float
    p_value: float = Field(..., ge=0.0, le=1.0)
    alpha: float = 0.05

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha
