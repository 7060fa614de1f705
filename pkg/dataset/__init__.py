"""JIGSAWS loading, preprocessing and fold construction."""

from .jigsaws import load_jigsaws, parse_kinematics, parse_meta, parse_trial_id
from .preprocessing import normalize, prepare_trial, segment
from .folds import make_folds
from .manifest import build_manifest, write_manifest
from .synthetic import generate_synthetic_trials, write_jigsaws_layout

__all__ = [
    "load_jigsaws",
    "parse_kinematics",
    "parse_meta",
    "parse_trial_id",
    "normalize",
    "prepare_trial",
    "segment",
    "make_folds",
    "build_manifest",
    "write_manifest",
    "generate_synthetic_trials",
    "write_jigsaws_layout",
]
