"""ingest: validate the dataset layout and write a manifest."""

from pathlib import Path
import json
import logging

from commands.common import synthetic_trials
from dataset.jigsaws import load_jigsaws
from dataset.manifest import write_manifest
from dataset.synthetic import write_jigsaws_layout
from models.configs import RunConfig

logger = logging.getLogger(__name__)


def cmd_ingest(run: RunConfig) -> Path:
    """Load every trial of the task selection and write ``<out>/manifest.json``.

    With ``synthetic`` the generated trials are first written out in the
    JIGSAWS layout under ``<out>/synthetic_jigsaws`` and read back from there.
    """
    if run.synthetic:
        root = write_jigsaws_layout(synthetic_trials(run), run.out_dir / "synthetic_jigsaws")
    else:
        root = run.require_dataset_root()

    trials = load_jigsaws(root, run.task.tasks())
    path = write_manifest(trials, run.out_dir / "manifest.json")

    counts = json.loads(path.read_text())["counts"]
    for code, count in counts.items():
        print(f"{code}: {count}")
    logger.info(f"Ingested {len(trials)} trials from {root}")
    return path
