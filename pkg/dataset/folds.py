"""Leave-one-supertrial-out and leave-one-user-out fold construction."""

from typing import List, Sequence
import logging

import numpy as np
from sklearn.model_selection import LeaveOneGroupOut

from errors import InsufficientGroupsError
from models.dataset import CVScheme, FoldSpec, KinematicTrial

logger = logging.getLogger(__name__)


def fold_key(trial: KinematicTrial, scheme: CVScheme) -> str:
    """Repetition index under LOSO, subject id under LOUO."""
    if scheme == CVScheme.LOSO:
        return str(trial.repetition)
    return trial.subject_id


def _key_order(key: str):
    return (0, int(key), key) if key.isdigit() else (1, 0, key)


def make_folds(trials: Sequence[KinematicTrial], scheme: CVScheme) -> List[FoldSpec]:
    """One fold per distinct key, ordered by key.

    Args:
        trials: Trials in scope (a single task or the pooled across-task set)
        scheme: LOSO or LOUO

    Returns:
        FoldSpecs whose test sets partition the trial ids
    """
    scheme = CVScheme(scheme)
    groups = np.array([fold_key(t, scheme) for t in trials])
    distinct = sorted(set(groups.tolist()), key=_key_order)
    if len(distinct) < 2:
        raise InsufficientGroupsError(
            f"{scheme.value} needs at least 2 distinct fold keys, found {distinct}"
        )

    ids = np.array([t.trial_id for t in trials])
    folds = []
    for train_idx, test_idx in LeaveOneGroupOut().split(np.zeros(len(ids)), groups=groups):
        key = str(groups[test_idx[0]])
        folds.append(FoldSpec(
            scheme=scheme,
            fold_key=key,
            train_ids=sorted(ids[train_idx].tolist()),
            test_ids=sorted(ids[test_idx].tolist()),
        ))

    folds.sort(key=lambda f: _key_order(f.fold_key))
    logger.info(
        f"{scheme.value}: {len(folds)} folds over {len(ids)} trials "
        f"(keys {', '.join(f.fold_key for f in folds)})"
    )
    return folds
