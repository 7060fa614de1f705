"""Per-segment feedback timeline and its exports."""

from pathlib import Path
from typing import Any, Dict, Optional
import json
import logging

import pandas as pd

from errors import EmptySequenceError
from feedback.bands import categorize
from feedback.descriptors import describe
from models.dataset import OSATS_CATEGORIES, OsatsCategory
from models.feedback import DescriptorTable, FeedbackEntry, FeedbackTimeline
from models.predictions import TrialPrediction
from templates.report_generator import render_feedback_report

logger = logging.getLogger(__name__)

TIMELINE_SCHEMA_VERSION = 1
CSV_COLUMNS = ["segment", "start_frame", "end_frame", "category", "score", "band", "descriptor"]
BLINDED_CSV_COLUMNS = [c for c in CSV_COLUMNS if c != "score"]


def build_timeline(
    prediction: TrialPrediction,
    descriptors: DescriptorTable,
    headline_category: OsatsCategory = OsatsCategory.OVERALL_PERFORMANCE,
) -> FeedbackTimeline:
    """One entry per segment and category, with band and descriptor.

    Segment s covers frames [(s - 1) L, s L).
    """
    if prediction.num_segments < 1:
        raise EmptySequenceError(f"{prediction.trial_id}: prediction has no segments")

    L = prediction.segment_length
    scores = prediction.segment_scores
    entries = []
    for s in range(prediction.num_segments):
        for category in OSATS_CATEGORIES:
            score = int(scores[s, category.index])
            band = categorize(score)
            entries.append(FeedbackEntry(
                segment=s + 1,
                start_frame=s * L,
                end_frame=(s + 1) * L,
                category=category,
                score=score,
                band=band,
                descriptor=describe(descriptors, category, band),
            ))
    return FeedbackTimeline(
        trial_id=prediction.trial_id,
        segment_length=L,
        headline_category=headline_category,
        entries=entries,
    )


def timeline_to_dict(timeline: FeedbackTimeline, blinded: bool = False) -> Dict[str, Any]:
    """JSON form of a timeline.

    The blinded form is what raters see: entries carry no score and no
    perturbation flag, and there is no perturbation log.
    """
    if blinded:
        data = timeline.model_dump(mode="json", exclude={
            "perturbation_log": True,
            "entries": {"__all__": {"score", "perturbed"}},
        })
    else:
        data = timeline.model_dump(mode="json")
    data["schema_version"] = TIMELINE_SCHEMA_VERSION
    data["num_segments"] = timeline.num_segments
    return data


def timeline_frame(timeline: FeedbackTimeline, blinded: bool = False) -> pd.DataFrame:
    columns = BLINDED_CSV_COLUMNS if blinded else CSV_COLUMNS
    rows = [
        {
            "segment": e.segment,
            "start_frame": e.start_frame,
            "end_frame": e.end_frame,
            "category": e.category.value,
            "score": e.score,
            "band": e.band.value,
            "descriptor": e.descriptor,
        }
        for e in sorted(timeline.entries, key=lambda e: (e.segment, e.category.index))
    ]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)[columns]


def plot_series(timeline: FeedbackTimeline) -> pd.DataFrame:
    """Wide table: one row per segment, one score column per category."""
    frame = timeline_frame(timeline)
    wide = frame.pivot(index="segment", columns="category", values="score")
    wide = wide.reindex(columns=[c.value for c in OSATS_CATEGORIES])
    wide.columns.name = None
    return wide.reset_index()


def write_timeline(
    timeline: FeedbackTimeline,
    out_dir: Path,
    stem: Optional[str] = None,
    perturbed: bool = False,
) -> Dict[str, Path]:
    """Write ``<stem>.json``, ``<stem>.csv``, ``<stem>_plot.csv`` and ``<stem>.md``.

    With ``perturbed`` the files are the rater copy: no scores anywhere, so
    no plot series either.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or timeline.trial_id
    paths = {
        "json": out_dir / f"{stem}.json",
        "csv": out_dir / f"{stem}.csv",
        "markdown": out_dir / f"{stem}.md",
    }
    paths["json"].write_text(
        json.dumps(timeline_to_dict(timeline, blinded=perturbed), indent=2, sort_keys=True) + "\n"
    )
    timeline_frame(timeline, blinded=perturbed).to_csv(paths["csv"], index=False)
    if not perturbed:
        paths["plot"] = out_dir / f"{stem}_plot.csv"
        plot_series(timeline).to_csv(paths["plot"], index=False)
    paths["markdown"].write_text(render_feedback_report(timeline, perturbed=perturbed))
    logger.info(f"Wrote feedback timeline for {timeline.trial_id} to {out_dir}")
    return paths
