"""eval: cross-validate, write per-fold results and the comparison tables."""

from pathlib import Path
from typing import Dict
import json
import logging

from commands.common import load_trials
from evaluation.cross_validation import FoldTrainer, run_cv, run_name
from evaluation.reports import read_results, report_tables, write_results
from models.configs import RunConfig

logger = logging.getLogger(__name__)


def cmd_eval(run: RunConfig) -> Dict[str, Path]:
    """Evaluate the run's task and scheme.

    Fold checkpoints written by ``train`` are reused; missing folds are
    trained. Tables are rebuilt from every results file under ``<out>/results``
    so runs for different tasks and schemes accumulate.
    """
    trials = load_trials(run)
    name = run_name(run.task, run.scheme)
    trainer = FoldTrainer(run.model, run.train, out_dir=run.out_dir, name=name, reuse_checkpoints=True)

    summary = run_cv(
        trials,
        run.task,
        run.scheme,
        run.model,
        run.train,
        train_fn=trainer,
        jobs=run.jobs,
        grs_representation=run.grs_representation,
    )
    paths = {"results": write_results(summary, run.out_dir)}

    summaries = [read_results(p) for p in sorted((run.out_dir / "results").glob("*.json"))]
    paths.update(report_tables(summaries, run.out_dir))

    print(json.dumps({
        "task": summary.task,
        "scheme": summary.scheme.value,
        "folds": len(summary.folds),
        "mean_scc_grs": summary.mean_scc_grs,
        "mean_scc_osats": summary.mean_scc_osats,
        "undefined_folds": summary.undefined_folds,
    }))
    return paths
