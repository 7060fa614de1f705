"""Cross-validation harness: one fresh model per fold."""

from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Union
import logging

from dataset.folds import make_folds
from evaluation.metrics import mean_defined, try_spearman
from evaluation.predict import predict_labelled
from models.configs import ModelConfig, TaskSelection, TrainConfig
from models.dataset import NUM_CATEGORIES, CVScheme, FoldSpec, LabelledTrial
from models.predictions import CVSummary, FoldResult, TrialOutcome, TrialPrediction
from network.checkpoint import load_checkpoint
from network.params import ModelParams
from training.trainer import train

logger = logging.getLogger(__name__)

TrainFn = Callable[[List[LabelledTrial], FoldSpec, int], Any]
PredictFn = Callable[[Any, LabelledTrial], TrialPrediction]


def run_name(task: Union[TaskSelection, str], scheme: Union[CVScheme, str]) -> str:
    return f"{TaskSelection(task).value}_{CVScheme(scheme).value}"


def checkpoint_path(out_dir: Path, name: str, fold_key: str) -> Path:
    return Path(out_dir) / "checkpoints" / f"{name}_fold-{fold_key}.ckpt"


def loss_log_path(out_dir: Path, name: str, fold_key: str) -> Path:
    return Path(out_dir) / "logs" / f"{name}_fold-{fold_key}.csv"


class FoldTrainer:
    """Default train function: train a fold, or reuse its checkpoint.

    With ``out_dir`` set, each fold writes its checkpoint and loss log there.
    With ``reuse_checkpoints`` an existing checkpoint for the fold is loaded
    instead of training; it must have been written with the same model and
    training configs.
    """

    def __init__(
        self,
        model_config: ModelConfig,
        train_config: TrainConfig,
        out_dir: Optional[Path] = None,
        name: str = "run",
        reuse_checkpoints: bool = False,
    ):
        self.model_config = model_config
        self.train_config = train_config
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.name = name
        self.reuse_checkpoints = reuse_checkpoints

    def __call__(self, trials: List[LabelledTrial], fold: FoldSpec, fold_index: int) -> ModelParams:
        ckpt = log = None
        if self.out_dir is not None:
            ckpt = checkpoint_path(self.out_dir, self.name, fold.fold_key)
            log = loss_log_path(self.out_dir, self.name, fold.fold_key)
            if self.reuse_checkpoints and ckpt.is_file():
                return load_checkpoint(
                    ckpt, expected_config=self.model_config, expected_train_config=self.train_config
                )
        result = train(
            trials,
            self.model_config,
            self.train_config,
            fold_key=fold.fold_key,
            fold_index=fold_index,
            checkpoint_path=ckpt,
            loss_log_path=log,
        )
        return result.params


def _predicted_osats(prediction: TrialPrediction, representation: str) -> List[float]:
    if representation == "argmax":
        return [float(s) for s in prediction.final_osats]
    return list(prediction.expected_osats)


def evaluate_fold(
    fold: FoldSpec,
    fold_index: int,
    trials_by_id: Dict[str, LabelledTrial],
    train_fn: TrainFn,
    predict_fn: PredictFn,
    grs_representation: str = "expected",
) -> FoldResult:
    """Train on the fold's train split and score its test split."""
    model = train_fn([trials_by_id[i] for i in fold.train_ids], fold, fold_index)

    outcomes = []
    for trial_id in fold.test_ids:
        labelled = trials_by_id[trial_id]
        prediction = predict_fn(model, labelled)
        outcomes.append(TrialOutcome(
            trial_id=trial_id,
            predicted_grs=float(prediction.grs),
            true_grs=labelled.labels.grs,
            predicted_osats=_predicted_osats(prediction, grs_representation),
            true_osats=list(labelled.labels.osats),
        ))

    scc_grs = try_spearman([o.predicted_grs for o in outcomes], [o.true_grs for o in outcomes])
    scc_per_osats = [
        try_spearman([o.predicted_osats[n] for o in outcomes], [o.true_osats[n] for o in outcomes])
        for n in range(NUM_CATEGORIES)
    ]
    if scc_grs is None:
        logger.warning(f"Fold {fold.fold_key}: GRS correlation undefined on {len(outcomes)} test trials")
    else:
        logger.info(f"Fold {fold.fold_key}: GRS SCC {scc_grs:.3f} on {len(outcomes)} test trials")

    return FoldResult(
        fold_key=fold.fold_key,
        scc_grs=scc_grs,
        scc_per_osats=scc_per_osats,
        n_test=len(outcomes),
        outcomes=outcomes,
    )


def summarize(task: str, scheme: CVScheme, folds: Sequence[FoldResult]) -> CVSummary:
    """Average fold correlations, skipping undefined ones."""
    per_osats = [
        mean_defined([f.scc_per_osats[n] if f.scc_per_osats else None for f in folds])
        for n in range(NUM_CATEGORIES)
    ]
    undefined = sum(1 for f in folds if f.grs_undefined)
    if undefined:
        logger.warning(f"{task} {scheme.value}: {undefined} of {len(folds)} folds excluded (undefined GRS correlation)")
    return CVSummary(
        task=task,
        scheme=scheme,
        folds=list(folds),
        mean_scc_grs=mean_defined([f.scc_grs for f in folds]),
        mean_scc_per_osats=per_osats,
        mean_scc_osats=mean_defined(per_osats),
        undefined_folds=undefined,
    )


def run_cv(
    trials: Sequence[LabelledTrial],
    task: Union[TaskSelection, str],
    scheme: Union[CVScheme, str],
    model_config: ModelConfig,
    train_config: TrainConfig,
    train_fn: Optional[TrainFn] = None,
    predict_fn: Optional[PredictFn] = None,
    jobs: int = 1,
    grs_representation: Literal["expected", "argmax"] = "expected",
) -> CVSummary:
    """Cross-validate over the folds of ``scheme``.

    Args:
        trials: Trials of the task selection (all three tasks pooled for ``across``)
        task: Task selection, used for labelling
        scheme: LOSO or LOUO
        model_config: Architecture for the default train function
        train_config: Optimization settings for the default train function
        train_fn: ``(train_trials, fold, fold_index) -> model``
        predict_fn: ``(model, trial) -> TrialPrediction``
        jobs: Worker processes; results are ordered by fold key either way
        grs_representation: Score representation entering the correlations

    Returns:
        CVSummary with one FoldResult per fold
    """
    task = TaskSelection(task)
    scheme = CVScheme(scheme)
    folds = make_folds([t.trial for t in trials], scheme)
    trials_by_id = {t.trial_id: t for t in trials}
    train_fn = train_fn or FoldTrainer(model_config, train_config)
    predict_fn = predict_fn or partial(predict_labelled, grs_representation=grs_representation)

    evaluate = partial(
        evaluate_fold,
        trials_by_id=trials_by_id,
        train_fn=train_fn,
        predict_fn=predict_fn,
        grs_representation=grs_representation,
    )
    if jobs > 1 and len(folds) > 1:
        logger.info(f"Running {len(folds)} folds on {jobs} worker processes")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate, folds, range(len(folds))))
    else:
        results = [evaluate(fold, i) for i, fold in enumerate(folds)]

    summary = summarize(task.value, scheme, results)
    logger.info(
        f"{task.value} {scheme.value}: mean GRS SCC "
        f"{summary.mean_scc_grs if summary.mean_scc_grs is not None else 'undefined'} over {len(results)} folds"
    )
    return summary
