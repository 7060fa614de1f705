"""train: one model per cross-validation fold, with checkpoints and loss logs."""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List
import logging

import pandas as pd

from commands.common import load_trials
from dataset.folds import make_folds
from evaluation.cross_validation import FoldTrainer, checkpoint_path, loss_log_path, run_name
from models.configs import RunConfig
from training.trainer import write_loss_log

logger = logging.getLogger(__name__)


def _train_fold(trainer: FoldTrainer, trials, fold, fold_index: int) -> str:
    trainer(trials, fold, fold_index)
    return fold.fold_key


def cmd_train(run: RunConfig) -> Dict[str, Path]:
    """Train every fold of the run's scheme.

    Writes ``checkpoints/<task>_<scheme>_fold-<key>.ckpt`` and
    ``logs/<task>_<scheme>_fold-<key>.csv`` per fold, plus the concatenated
    ``logs/<task>_<scheme>_loss.csv``.

    Returns:
        Mapping fold key -> checkpoint path
    """
    trials = load_trials(run)
    by_id = {t.trial_id: t for t in trials}
    folds = make_folds([t.trial for t in trials], run.scheme)
    name = run_name(run.task, run.scheme)
    trainer = FoldTrainer(run.model, run.train, out_dir=run.out_dir, name=name)

    jobs = [([by_id[i] for i in fold.train_ids], fold, index) for index, fold in enumerate(folds)]
    if run.jobs > 1 and len(folds) > 1:
        with ProcessPoolExecutor(max_workers=run.jobs) as pool:
            list(pool.map(_train_fold, [trainer] * len(jobs), *zip(*jobs)))
    else:
        for fold_trials, fold, index in jobs:
            _train_fold(trainer, fold_trials, fold, index)

    logs: List[pd.DataFrame] = [pd.read_csv(loss_log_path(run.out_dir, name, f.fold_key), dtype={"fold": str}) for f in folds]
    combined = write_loss_log(pd.concat(logs, ignore_index=True), run.out_dir / "logs" / f"{name}_loss.csv")
    logger.info(f"Trained {len(folds)} folds; loss log at {combined}")

    checkpoints = {f.fold_key: checkpoint_path(run.out_dir, name, f.fold_key) for f in folds}
    for key, path in checkpoints.items():
        print(f"fold {key}: {path}")
    return checkpoints
