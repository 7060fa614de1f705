"""Seeded synthetic trials with skill-dependent kinematics.

Each trial gets a latent skill in [0, 1]. The kinematics mix smooth periodic
motion with tremor and idle drift whose amplitudes shrink as skill grows, and
the OSATS labels are read off the same latent skill. A model that can tell
smooth from shaky motion can therefore recover the labels.
"""

from pathlib import Path
from string import ascii_uppercase
from typing import List, Sequence, Tuple
import logging

import numpy as np

from dataset.jigsaws import META_TO_OSATS, task_paths
from errors import ConfigError
from models.dataset import (
    KINEMATIC_DIM,
    NUM_CATEGORIES,
    KinematicTrial,
    LabelledTrial,
    SkillLevel,
    Task,
    TrialLabels,
)

logger = logging.getLogger(__name__)

# JIGSAWS subjects are lettered from B
SUBJECT_LETTERS = ascii_uppercase[1:]
LEVEL_CODES = {SkillLevel.NOVICE: "N", SkillLevel.INTERMEDIATE: "I", SkillLevel.EXPERT: "E"}

TREMOR_SCALE = 1.5
DRIFT_SCALE = 2.0
LEARNING_RATE_PER_REPETITION = 0.03


def skill_level(skill: float) -> SkillLevel:
    if skill < 0.4:
        return SkillLevel.NOVICE
    if skill < 0.7:
        return SkillLevel.INTERMEDIATE
    return SkillLevel.EXPERT


def skill_to_osats(skill: float, rng: np.random.Generator) -> List[int]:
    """Five scores centred on 1 + 4 * skill with small per-category jitter."""
    jitter = rng.uniform(-0.3, 0.3, size=NUM_CATEGORIES)
    return [int(np.clip(np.rint(1.0 + 4.0 * skill + j), 1, 5)) for j in jitter]


def synthesize_frames(
    skill: float,
    num_frames: int,
    dim: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """T x dim kinematics: smooth motion plus (1 - skill)-scaled tremor and drift."""
    t = np.linspace(0.0, 1.0, num_frames)[:, None]
    freqs = rng.uniform(0.5, 3.0, size=(1, dim))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(1, dim))
    amps = rng.uniform(0.5, 2.0, size=(1, dim))
    offsets = rng.normal(0.0, 1.0, size=(1, dim))
    motion = offsets + amps * np.sin(2.0 * np.pi * freqs * t + phases)

    unskilled = 1.0 - skill
    tremor = TREMOR_SCALE * unskilled * rng.normal(size=(num_frames, dim))
    drift = DRIFT_SCALE * unskilled * np.cumsum(rng.normal(size=(num_frames, dim)), axis=0) / np.sqrt(num_frames)
    return motion + tremor + drift


def generate_synthetic_trials(
    tasks: Sequence[Task] = (Task.KNOT_TYING,),
    subjects: int = 8,
    repetitions: int = 5,
    frames: Tuple[int, int] = (300, 600),
    dim: int = KINEMATIC_DIM,
    seed: int = 0,
) -> List[LabelledTrial]:
    """Generate labelled trials for every (task, subject, repetition).

    Args:
        tasks: Tasks to generate
        subjects: Number of subjects (lettered B, C, ...)
        repetitions: Trials per subject and task
        frames: Inclusive (min, max) frame count per trial
        dim: Features per frame
        seed: Seed of the generator

    Returns:
        Trials sorted by trial id
    """
    if not 1 <= subjects <= len(SUBJECT_LETTERS):
        raise ConfigError(f"subjects must be in [1, {len(SUBJECT_LETTERS)}], got {subjects}")
    if repetitions < 1 or frames[0] < 2 or frames[1] < frames[0]:
        raise ConfigError(f"invalid synthetic shape: repetitions={repetitions}, frames={frames}")

    rng = np.random.default_rng(seed)
    base_skill = rng.permutation(np.linspace(0.05, 0.95, subjects))

    trials = []
    for task in tasks:
        for s, letter in enumerate(SUBJECT_LETTERS[:subjects]):
            for rep in range(1, repetitions + 1):
                skill = float(np.clip(
                    base_skill[s] + LEARNING_RATE_PER_REPETITION * (rep - 1) + rng.normal(0.0, 0.03),
                    0.0, 1.0,
                ))
                num_frames = int(rng.integers(frames[0], frames[1] + 1))
                trials.append(LabelledTrial(
                    trial=KinematicTrial(
                        trial_id=f"{task.directory}_{letter}{rep:03d}",
                        task=task,
                        subject_id=letter,
                        repetition=rep,
                        frames=synthesize_frames(skill, num_frames, dim, rng),
                        self_claimed_level=skill_level(skill),
                    ),
                    labels=TrialLabels.from_osats(skill_to_osats(skill, rng)),
                ))

    trials.sort(key=lambda t: t.trial_id)
    logger.info(f"Generated {len(trials)} synthetic trials (seed {seed}, {dim} features)")
    return trials


def meta_line(trial: LabelledTrial) -> str:
    """One meta-file line; quality of final product repeats the overall score."""
    elements = [0] * 6
    for osats_index, meta_index in enumerate(META_TO_OSATS):
        elements[meta_index] = trial.labels.osats[osats_index]
    elements[5] = trial.labels.osats[-1]
    level = LEVEL_CODES[trial.trial.self_claimed_level or SkillLevel.NOVICE]
    return "\t".join([trial.trial_id, level, str(sum(elements))] + [str(e) for e in elements])


def write_jigsaws_layout(trials: Sequence[LabelledTrial], root: Path) -> Path:
    """Write trials as a JIGSAWS directory tree under ``root``."""
    root = Path(root)
    for t in trials:
        if t.trial.num_features != KINEMATIC_DIM:
            raise ConfigError(
                f"JIGSAWS layout needs {KINEMATIC_DIM} features, {t.trial_id} has {t.trial.num_features}"
            )

    by_task = {}
    for t in trials:
        by_task.setdefault(t.trial.task, []).append(t)

    for task, task_trials in by_task.items():
        kin_dir, meta_file = task_paths(root, task)
        kin_dir.mkdir(parents=True, exist_ok=True)
        for t in task_trials:
            np.savetxt(kin_dir / f"{t.trial_id}.txt", t.trial.frames, fmt="%.10g")
        meta_file.write_text("\n".join(meta_line(t) for t in sorted(task_trials, key=lambda t: t.trial_id)) + "\n")
        logger.info(f"Wrote {len(task_trials)} {task.value} trials under {kin_dir.parent.parent}")
    return root
