"""report: held-out feedback timelines, optionally blinded for a rater study."""

from pathlib import Path
from typing import Dict, List, Optional
import logging

import numpy as np

from commands.common import load_trials
from dataset.folds import make_folds
from errors import MissingTrialError
from evaluation.cross_validation import FoldTrainer, run_name
from evaluation.predict import predict_trial
from feedback.descriptors import load_descriptors
from feedback.rater_validation import blinded_copy, perturb_predictions, write_unblinding_log
from feedback.timeline import build_timeline, write_timeline
from models.configs import RunConfig

logger = logging.getLogger(__name__)


def cmd_report(
    run: RunConfig,
    trial_id: Optional[str] = None,
    flip_rate: Optional[float] = None,
) -> List[Dict[str, Path]]:
    """Write a feedback timeline for each trial from the fold that held it out.

    Args:
        run: Resolved run configuration
        trial_id: Restrict to one trial
        flip_rate: Also write a blinded copy with this band replacement rate and
            its unblinding log

    Returns:
        Written paths, one mapping per trial
    """
    trials = load_trials(run)
    if trial_id is not None and trial_id not in {t.trial_id for t in trials}:
        raise MissingTrialError(f"trial {trial_id} is not part of task selection {run.task.value}")

    by_id = {t.trial_id: t for t in trials}
    name = run_name(run.task, run.scheme)
    trainer = FoldTrainer(run.model, run.train, out_dir=run.out_dir, name=name, reuse_checkpoints=True)
    descriptors = load_descriptors()
    rng = np.random.default_rng(run.seed)
    feedback_dir = run.out_dir / "feedback" / name

    written = []
    for index, fold in enumerate(make_folds([t.trial for t in trials], run.scheme)):
        targets = [i for i in fold.test_ids if trial_id is None or i == trial_id]
        if not targets:
            continue
        params = trainer([by_id[i] for i in fold.train_ids], fold, index)
        for target in targets:
            prediction = predict_trial(params, by_id[target].trial, run.grs_representation)
            timeline = build_timeline(prediction, descriptors)
            paths = write_timeline(timeline, feedback_dir)
            if flip_rate is not None:
                perturbed = perturb_predictions(timeline, rng, flip_rate, descriptors=descriptors)
                paths.update({
                    f"blinded_{k}": v
                    for k, v in write_timeline(blinded_copy(perturbed), feedback_dir / "blinded", perturbed=True).items()
                })
                paths["unblinding"] = write_unblinding_log(perturbed, feedback_dir / "unblinding" / f"{target}.json")
            written.append(paths)
            print(f"{target}: {paths['json']}")

    logger.info(f"Wrote {len(written)} feedback timelines to {feedback_dir}")
    return written
