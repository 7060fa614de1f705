"""Rater-study protocol: blinded band perturbation and the agreement test.

Raters see band timelines, some of which carry randomly replaced bands, and
record whether they agree with each shown band. Agreement on the model's
bands is then tested against the agreement rate on the noise bands.
"""

from pathlib import Path
from typing import Iterable, List, Optional, Sequence
import json
import logging

import numpy as np
from scipy.special import gammaln, logsumexp

from errors import RangeError
from feedback.descriptors import describe, load_descriptors
from models.dataset import OSATS_CATEGORIES, OsatsCategory
from models.feedback import (
    AgreementSummary,
    Band,
    BinomialComparison,
    DescriptorTable,
    FeedbackTimeline,
    PerturbationRecord,
    RaterCondition,
    RaterResponse,
)

logger = logging.getLogger(__name__)

BANDS = list(Band)


def perturb_predictions(
    timeline: FeedbackTimeline,
    rng: np.random.Generator,
    flip_rate: float,
    categories: Optional[Sequence[OsatsCategory]] = None,
    descriptors: Optional[DescriptorTable] = None,
) -> FeedbackTimeline:
    """Replace bands at random for blinding.

    Each entry of the selected categories (all five OSATS categories by
    default) is, with probability ``flip_rate``, given a uniformly chosen
    different band and the matching descriptor. Scores are kept here; the
    rater copy drops them. Every replacement is logged.

    Returns:
        A new timeline; the input is not modified
    """
    if not 0.0 <= flip_rate <= 1.0:
        raise RangeError(f"flip rate must be in [0, 1], got {flip_rate}")
    categories = set(categories or OSATS_CATEGORIES)
    descriptors = descriptors or load_descriptors()

    entries = []
    log: List[PerturbationRecord] = list(timeline.perturbation_log)
    for entry in sorted(timeline.entries, key=lambda e: (e.segment, e.category.index)):
        if entry.category not in categories or rng.random() >= flip_rate:
            entries.append(entry)
            continue
        others = [b for b in BANDS if b != entry.band]
        shown = others[int(rng.integers(len(others)))]
        entries.append(entry.model_copy(update={
            "band": shown,
            "descriptor": describe(descriptors, entry.category, shown),
            "perturbed": True,
        }))
        log.append(PerturbationRecord(
            segment=entry.segment,
            category=entry.category,
            original_band=entry.band,
            shown_band=shown,
        ))

    logger.info(f"{timeline.trial_id}: replaced {len(log) - len(timeline.perturbation_log)} bands (rate {flip_rate})")
    return timeline.model_copy(update={"entries": entries, "perturbation_log": log})


def blinded_copy(timeline: FeedbackTimeline) -> FeedbackTimeline:
    """Timeline as shown to raters: no perturbation flags, no log."""
    return timeline.model_copy(update={
        "entries": [e.model_copy(update={"perturbed": False}) for e in timeline.entries],
        "perturbation_log": [],
    })


def write_unblinding_log(timeline: FeedbackTimeline, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records = [r.model_dump(mode="json") for r in timeline.perturbation_log]
    path.write_text(json.dumps({"trial_id": timeline.trial_id, "perturbations": records}, indent=2) + "\n")
    return path


def binomial_test_one_tailed(k: int, n: int, p0: float) -> float:
    """P[X >= k] for X ~ Binomial(n, p0), summed exactly in log space."""
    if n < 0 or not 0 <= k <= n:
        raise RangeError(f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 < p0 < 1.0:
        raise RangeError(f"p0 must be in (0, 1), got {p0}")
    if k == 0:
        return 1.0

    i = np.arange(k, n + 1, dtype=np.float64)
    log_terms = (
        gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
        + i * np.log(p0) + (n - i) * np.log1p(-p0)
    )
    return float(min(1.0, np.exp(logsumexp(log_terms))))


def agreement_summary(responses: Iterable[RaterResponse]) -> AgreementSummary:
    counts = {c: [0, 0] for c in RaterCondition}
    for response in responses:
        counts[response.condition][0] += int(response.agreed)
        counts[response.condition][1] += 1
    return AgreementSummary(
        model_agreed=counts[RaterCondition.MODEL][0],
        model_total=counts[RaterCondition.MODEL][1],
        noise_agreed=counts[RaterCondition.NOISE][0],
        noise_total=counts[RaterCondition.NOISE][1],
    )


def compare_conditions(summary: AgreementSummary, alpha: float = 0.05) -> BinomialComparison:
    """Test model-condition agreement against the noise-condition rate."""
    p0 = summary.noise_rate
    if p0 is None or summary.model_total == 0:
        raise RangeError("both conditions need at least one response")
    if not 0.0 < p0 < 1.0:
        raise RangeError(f"noise agreement rate {p0} leaves nothing to test")
    p_value = binomial_test_one_tailed(summary.model_agreed, summary.model_total, p0)
    logger.info(
        f"Agreement {summary.model_agreed}/{summary.model_total} vs noise rate {p0:.3f}: p = {p_value:.4g}"
    )
    return BinomialComparison(k=summary.model_agreed, n=summary.model_total, p0=p0, p_value=p_value, alpha=alpha)
