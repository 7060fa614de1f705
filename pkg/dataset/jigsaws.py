"""JIGSAWS kinematics and meta-file parsing."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import re

import numpy as np

from errors import (
    EmptyFileError,
    LayoutError,
    MetaFormatError,
    MissingTrialError,
    NonFiniteError,
    RowWidthError,
    ScoreRangeError,
)
from models.dataset import (
    KINEMATIC_DIM,
    KinematicTrial,
    LabelledTrial,
    SkillLevel,
    Task,
    TrialLabels,
)

logger = logging.getLogger(__name__)

TRIAL_ID_PATTERN = re.compile(r"^(Knot_Tying|Needle_Passing|Suturing)_([A-Z])(\d{3})$")

# Element order in the meta files: respect for tissue, suture/needle handling,
# time and motion, flow of operation, overall performance, quality of final product.
# Reordered to (time and motion, flow, handling, tissue, overall); the last is dropped.
META_TO_OSATS = [2, 3, 1, 0, 4]
META_ELEMENTS = 6


def parse_trial_id(trial_id: str) -> Tuple[Task, str, int]:
    """Split a JIGSAWS trial id into (task, subject, repetition).

    Args:
        trial_id: e.g. ``Knot_Tying_B001``

    Returns:
        (Task.KNOT_TYING, "B", 1)
    """
    match = TRIAL_ID_PATTERN.match(trial_id)
    if not match:
        raise MetaFormatError(f"unrecognised trial id: {trial_id!r}")
    task = Task.from_directory(match.group(1))
    return task, match.group(2), int(match.group(3))


def parse_kinematics(text: str, width: int = KINEMATIC_DIM) -> np.ndarray:
    """Parse a kinematics file: one whitespace-separated row of reals per frame.

    Args:
        text: File contents
        width: Expected number of values per row

    Returns:
        T x width float64 matrix in file order
    """
    rows = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != width:
            raise RowWidthError(line_number, len(tokens), width)
        try:
            row = [float(token) for token in tokens]
        except ValueError:
            raise NonFiniteError(f"line {line_number}: value is not a real number")
        rows.append(row)
        if not all(np.isfinite(row)):
            raise NonFiniteError(f"line {line_number}: non-finite value")

    if not rows:
        raise EmptyFileError("kinematics file has no rows")
    return np.asarray(rows, dtype=np.float64)


def parse_meta(
    text: str,
    required_ids: Optional[Sequence[str]] = None,
) -> Dict[str, Tuple[TrialLabels, SkillLevel]]:
    """Parse a JIGSAWS meta file into labels.

    Each line holds: trial id, skill level (N/I/E), GRS, six element scores. The
    quality-of-final-product element is dropped and the GRS recomputed from the
    remaining five.

    Args:
        text: File contents
        required_ids: Trial ids that must be present

    Returns:
        Mapping trial_id -> (TrialLabels, self-claimed level)
    """
    labels: Dict[str, Tuple[TrialLabels, SkillLevel]] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 3 + META_ELEMENTS:
            raise MetaFormatError(
                f"line {line_number}: expected {3 + META_ELEMENTS} fields, found {len(tokens)}"
            )
        trial_id, level_code = tokens[0], tokens[1]
        try:
            int(tokens[2])
            elements = [int(token) for token in tokens[3:]]
            level = SkillLevel.from_meta_code(level_code)
        except ValueError as e:
            raise MetaFormatError(f"line {line_number}: {e}")

        for score in elements:
            if not 1 <= score <= 5:
                raise ScoreRangeError(f"{trial_id}: element score {score} outside [1, 5]")

        labels[trial_id] = (TrialLabels.from_osats([elements[i] for i in META_TO_OSATS]), level)

    if not labels:
        raise EmptyFileError("meta file has no rows")

    missing = [trial_id for trial_id in (required_ids or ()) if trial_id not in labels]
    if missing:
        raise MissingTrialError(f"no meta entry for: {', '.join(missing)}")
    return labels


def task_paths(root: Path, task: Task) -> Tuple[Path, Path]:
    """(kinematics directory, meta file) of one task."""
    task_dir = root / task.directory
    return (
        task_dir / "kinematics" / "AllGestures",
        task_dir / f"meta_file_{task.directory}.txt",
    )


def check_layout(root: Path, tasks: Sequence[Task]) -> None:
    """Raise LayoutError listing every missing path."""
    missing = []
    for task in tasks:
        kin_dir, meta_file = task_paths(root, task)
        if not kin_dir.is_dir():
            missing.append(str(kin_dir))
        elif not any(kin_dir.glob("*.txt")):
            missing.append(str(kin_dir / "*.txt"))
        if not meta_file.is_file():
            missing.append(str(meta_file))
    if missing:
        raise LayoutError(missing)


def load_jigsaws(root: Path, tasks: Sequence[Task]) -> List[LabelledTrial]:
    """Load every labelled trial of the selected tasks.

    Args:
        root: JIGSAWS root directory
        tasks: Tasks to read

    Returns:
        Trials joined with labels, sorted by trial id
    """
    root = Path(root)
    check_layout(root, tasks)

    trials: List[LabelledTrial] = []
    for task in tasks:
        kin_dir, meta_file = task_paths(root, task)
        kin_files = sorted(kin_dir.glob("*.txt"))
        ids = [path.stem for path in kin_files]
        meta = parse_meta(meta_file.read_text(), required_ids=ids)

        for path in kin_files:
            trial_id = path.stem
            parsed_task, subject, repetition = parse_trial_id(trial_id)
            if parsed_task != task:
                raise MetaFormatError(f"{path}: trial id does not belong to {task.value}")
            try:
                frames = parse_kinematics(path.read_text())
            except (RowWidthError, NonFiniteError, EmptyFileError):
                logger.error(f"Failed to parse kinematics file {path}")
                raise
            labels, level = meta[trial_id]
            trials.append(LabelledTrial(
                trial=KinematicTrial(
                    trial_id=trial_id,
                    task=task,
                    subject_id=subject,
                    repetition=repetition,
                    frames=frames,
                    self_claimed_level=level,
                ),
                labels=labels,
            ))
        logger.info(f"Loaded {len(kin_files)} {task.value} trials from {kin_dir}")

    trials.sort(key=lambda t: t.trial_id)
    return trials
