"""Shared flags, run-configuration resolution and data loading for the commands."""

from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple
import logging
import os

from dotenv import dotenv_values
from pydantic import ValidationError

from config import settings
from dataset.jigsaws import load_jigsaws
from dataset.synthetic import generate_synthetic_trials
from errors import ConfigError
from models.configs import ModelConfig, RunConfig, TaskSelection, TrainConfig
from models.dataset import CVScheme, LabelledTrial

logger = logging.getLogger(__name__)

RUN_KEYS = {"dataset_root", "task", "scheme", "out", "jobs", "seed", "synthetic", "grs_representation"}
MODEL_KEYS = set(ModelConfig.model_fields) - {"seed"}
TRAIN_KEYS = set(TrainConfig.model_fields) - {"seed"}

# flag dest -> config key
FLAG_KEYS = {
    "dataset_root": "dataset_root",
    "task": "task",
    "scheme": "scheme",
    "out": "out",
    "jobs": "jobs",
    "seed": "seed",
    "synthetic": "synthetic",
    "epochs": "epochs",
    "lr": "learning_rate",
    "batch_size": "batch_size",
    "grs_representation": "grs_representation",
}

# Synthetic cohort shaped like one JIGSAWS task: 8 subjects, 5 repetitions
SYNTHETIC_SUBJECTS = 8
SYNTHETIC_REPETITIONS = 5
SYNTHETIC_SEGMENTS = (3, 8)


def add_shared_arguments(parser: ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key=value run configuration file")
    parser.add_argument("--dataset-root", dest="dataset_root", default=None, help="JIGSAWS root directory")
    parser.add_argument("--task", choices=[t.value for t in TaskSelection], default=None)
    parser.add_argument("--scheme", choices=[s.value for s in CVScheme], default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=None, help="folds run in parallel")
    parser.add_argument("--synthetic", action="store_true", default=None, help="use generated trials instead of JIGSAWS")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None, help="learning rate")
    parser.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    parser.add_argument(
        "--grs-representation", dest="grs_representation",
        choices=["expected", "argmax"], default=None,
        help="OSATS representation summed into the predicted GRS",
    )


def read_config_file(path: Optional[Path]) -> Dict[str, str]:
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = {k: v for k, v in dotenv_values(path).items() if v is not None}
    unknown = sorted(set(values) - RUN_KEYS - MODEL_KEYS - TRAIN_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys in {path}: {', '.join(unknown)}")
    return values


def _bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def resolve_run_config(args: Namespace) -> Tuple[RunConfig, Dict[str, str]]:
    """Merge CLI flags, config file, environment and defaults, in that order.

    Returns:
        (RunConfig, mapping key -> source)
    """
    cli = {
        FLAG_KEYS[dest]: value
        for dest, value in vars(args).items()
        if dest in FLAG_KEYS and value is not None
    }
    file_values = read_config_file(getattr(args, "config", None))
    env = {"dataset_root": os.environ.get("RTRANS_DATASET_ROOT") or settings.RTRANS_DATASET_ROOT}
    env = {k: v for k, v in env.items() if v}
    defaults = {"out": settings.RTRANS_OUTPUT_DIR}

    merged: Dict[str, Any] = {}
    sources: Dict[str, str] = {}
    for layer_name, layer in (("default", defaults), ("env", env), ("config", file_values), ("cli", cli)):
        for key, value in layer.items():
            merged[key] = value
            sources[key] = layer_name

    if "synthetic" in merged:
        merged["synthetic"] = _bool(merged["synthetic"])
    try:
        seed = int(merged.get("seed", 0))
    except ValueError:
        raise ConfigError(f"seed must be an integer, got {merged['seed']!r}")
    model_values = {k: v for k, v in merged.items() if k in MODEL_KEYS}
    train_values = {k: v for k, v in merged.items() if k in TRAIN_KEYS}
    run_values = {k: v for k, v in merged.items() if k in RUN_KEYS}

    try:
        run = RunConfig(
            model=ModelConfig(**model_values, seed=seed),
            train=TrainConfig(**train_values, seed=seed),
            **{**run_values, "seed": seed},
        )
    except ValidationError as e:
        raise ConfigError(str(e)) from e

    log_resolution(run, sources)
    return run, sources


def log_resolution(run: RunConfig, sources: Dict[str, str]) -> None:
    flat = {
        **{k: v for k, v in run.model_dump(exclude={"model", "train"}).items()},
        **run.model.model_dump(),
        **run.train.model_dump(),
    }
    for key in sorted(flat):
        logger.info(f"config {key} = {flat[key]!r} ({sources.get(key, 'default')})")


def run_context(command: str, run: Optional[RunConfig]) -> Dict[str, Any]:
    """Context attached to error reports."""
    if run is None:
        return {"command": command}
    return {
        "command": command,
        "task": run.task.value,
        "scheme": run.scheme.value,
        "seed": run.seed,
        "synthetic": run.synthetic,
        "dataset_root": run.dataset_root,
    }


def synthetic_trials(run: RunConfig) -> List[LabelledTrial]:
    L = run.model.segment_length
    low, high = SYNTHETIC_SEGMENTS
    return generate_synthetic_trials(
        tasks=run.task.tasks(),
        subjects=SYNTHETIC_SUBJECTS,
        repetitions=SYNTHETIC_REPETITIONS,
        frames=(low * L, high * L),
        dim=run.model.input_dim,
        seed=run.seed,
    )


def load_trials(run: RunConfig) -> List[LabelledTrial]:
    """Trials of the run's task selection, from JIGSAWS or the generator."""
    if run.synthetic:
        return synthetic_trials(run)
    trials = load_jigsaws(run.require_dataset_root(), run.task.tasks())
    for trial in trials:
        if trial.trial.num_features != run.model.input_dim:
            raise ConfigError(
                f"{trial.trial_id} has {trial.trial.num_features} features, model expects {run.model.input_dim}"
            )
    return trials
