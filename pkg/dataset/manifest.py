"""JSON manifest of a loaded dataset."""

from collections import Counter
from pathlib import Path
from typing import Any, Dict, Sequence
import json
import logging

from models.dataset import LabelledTrial

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1


def build_manifest(trials: Sequence[LabelledTrial]) -> Dict[str, Any]:
    counts = Counter(t.trial.task.code for t in trials)
    return {
        "format_version": MANIFEST_VERSION,
        "num_trials": len(trials),
        "counts": dict(sorted(counts.items())),
        "trials": [
            {
                "trial_id": t.trial_id,
                "task": t.trial.task.value,
                "subject_id": t.trial.subject_id,
                "repetition": t.trial.repetition,
                "shape": [t.trial.num_frames, t.trial.num_features],
                "osats": list(t.labels.osats),
                "grs": t.labels.grs,
                "self_claimed_level": t.trial.self_claimed_level.value if t.trial.self_claimed_level else None,
            }
            for t in sorted(trials, key=lambda t: t.trial_id)
        ],
    }


def write_manifest(trials: Sequence[LabelledTrial], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(build_manifest(trials), indent=2, sort_keys=True) + "\n")
    logger.info(f"Wrote manifest for {len(trials)} trials to {path}")
    return path
