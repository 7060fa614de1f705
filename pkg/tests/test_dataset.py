"""Test suite for JIGSAWS parsing, normalization, segmentation and folds"""

import json

import numpy as np
import pytest

from dataset.folds import make_folds
from dataset.jigsaws import check_layout, load_jigsaws, parse_kinematics, parse_meta, parse_trial_id
from dataset.manifest import build_manifest, write_manifest
from dataset.preprocessing import STD_EPS, _standardize, normalize, normalize_frames, prepare_trial, segment
from dataset.synthetic import generate_synthetic_trials, write_jigsaws_layout
from errors import (
    ConfigError,
    DegenerateTrialError,
    EmptyFileError,
    InsufficientGroupsError,
    LayoutError,
    MetaFormatError,
    MissingTrialError,
    NonFiniteError,
    RangeError,
    RowWidthError,
    ScoreRangeError,
    TooShortError,
)
from models.dataset import CVScheme, KinematicTrial, SkillLevel, Task


def _trial(frames, trial_id="Knot_Tying_B001"):
    return KinematicTrial(trial_id=trial_id, task=Task.KNOT_TYING, subject_id="B", repetition=1, frames=frames)


# Kinematics

def test_parse_kinematics_rows_in_order():
    """Test rows are parsed in file order"""
    frames = parse_kinematics("1 2 3\n4 5 6\n", width=3)
    assert frames.shape == (2, 3)
    np.testing.assert_array_equal(frames[1], [4.0, 5.0, 6.0])


def test_parse_kinematics_full_width():
    """Test a single 76-value row"""
    frames = parse_kinematics(" ".join(["0.5"] * 76))
    assert frames.shape == (1, 76)


def test_parse_kinematics_wrong_width():
    """Test a short row reports its line number"""
    with pytest.raises(RowWidthError) as exc:
        parse_kinematics("1 2 3\n1 2\n", width=3)
    assert exc.value.line_number == 2
    assert exc.value.found == 2


@pytest.mark.parametrize("token", ["nan", "inf", "abc"])
def test_parse_kinematics_non_finite(token):
    """Test NaN, inf and garbage are rejected"""
    with pytest.raises(NonFiniteError):
        parse_kinematics(f"1 {token} 3\n", width=3)


def test_parse_kinematics_empty():
    """Test an empty file is rejected"""
    with pytest.raises(EmptyFileError):
        parse_kinematics("\n\n", width=3)


# Meta files

def test_parse_meta_reorders_and_drops_quality():
    """Test meta elements map onto the five OSATS categories"""
    # tissue, handling, time, flow, overall, quality
    labels = parse_meta("Knot_Tying_B001\tN\t13\t2\t3\t4\t1\t5\t1\n")
    trial_labels, level = labels["Knot_Tying_B001"]
    assert trial_labels.osats == [4, 1, 3, 2, 5]
    assert trial_labels.grs == 15
    assert level == SkillLevel.NOVICE


def test_parse_meta_score_out_of_range():
    """Test an element score of 6 is rejected"""
    with pytest.raises(ScoreRangeError):
        parse_meta("Knot_Tying_B001 E 20 6 3 3 3 3 3\n")


def test_parse_meta_wrong_field_count():
    """Test a line with a missing element"""
    with pytest.raises(MetaFormatError):
        parse_meta("Knot_Tying_B001 E 20 3 3 3 3 3\n")


def test_parse_meta_missing_trial():
    """Test a kinematics trial without a meta entry"""
    with pytest.raises(MissingTrialError):
        parse_meta("Knot_Tying_B001 E 18 3 3 3 3 3 3\n", required_ids=["Knot_Tying_B001", "Knot_Tying_B002"])


def test_parse_trial_id():
    """Test trial ids split into task, subject and repetition"""
    assert parse_trial_id("Needle_Passing_D004") == (Task.NEEDLE_PASSING, "D", 4)
    with pytest.raises(MetaFormatError):
        parse_trial_id("Knot_Tying_1")


# Layout

def test_load_jigsaws_from_written_layout(tmp_path, full_width_trials):
    """Test trials survive a write to and read from the JIGSAWS layout"""
    root = write_jigsaws_layout(full_width_trials, tmp_path / "jigsaws")
    loaded = load_jigsaws(root, [Task.KNOT_TYING])

    assert [t.trial_id for t in loaded] == [t.trial_id for t in full_width_trials]
    for original, parsed in zip(full_width_trials, loaded):
        assert parsed.labels == original.labels
        assert parsed.trial.self_claimed_level == original.trial.self_claimed_level
        np.testing.assert_allclose(parsed.trial.frames, original.trial.frames, rtol=1e-8, atol=1e-9)


def test_check_layout_lists_missing_paths(tmp_path):
    """Test an empty root reports both the kinematics directory and the meta file"""
    with pytest.raises(LayoutError) as exc:
        check_layout(tmp_path, [Task.KNOT_TYING])
    assert len(exc.value.missing) == 2
    assert any("meta_file_Knot_Tying.txt" in p for p in exc.value.missing)


def test_check_layout_empty_kinematics_directory(tmp_path):
    """Test a kinematics directory without files"""
    (tmp_path / "Knot_Tying" / "kinematics" / "AllGestures").mkdir(parents=True)
    (tmp_path / "Knot_Tying" / "meta_file_Knot_Tying.txt").write_text("")
    with pytest.raises(LayoutError) as exc:
        check_layout(tmp_path, [Task.KNOT_TYING])
    assert exc.value.missing[0].endswith("*.txt")


def test_write_layout_rejects_reduced_width(tmp_path, synthetic_trials):
    """Test only 76-feature trials can be written as JIGSAWS files"""
    with pytest.raises(ConfigError):
        write_jigsaws_layout(synthetic_trials, tmp_path)


def test_manifest_counts(tmp_path, full_width_trials):
    """Test the manifest counts trials per task"""
    manifest = build_manifest(full_width_trials)
    assert manifest["num_trials"] == 2
    assert manifest["counts"] == {"KT": 2}

    path = write_manifest(full_width_trials, tmp_path / "manifest.json")
    assert json.loads(path.read_text()) == manifest


# Normalization

def test_single_sweep_standardizes_frames(rng):
    """Test one sweep leaves every frame with zero mean and unit std"""
    y = normalize_frames(rng.normal(3.0, 2.0, size=(40, 6)), max_sweeps=1)
    np.testing.assert_allclose(y.mean(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(y.std(axis=1), 1.0, atol=1e-12)


def test_iterated_sweeps_standardize_both_axes(rng):
    """Test the converged result is standardized over time and over features"""
    y = normalize_frames(rng.normal(size=(60, 6)) * np.arange(1, 7))
    np.testing.assert_allclose(y.mean(axis=0), 0.0, atol=1e-6)
    np.testing.assert_allclose(y.std(axis=0), 1.0, atol=1e-6)
    np.testing.assert_allclose(y.mean(axis=1), 0.0, atol=1e-9)


def test_single_sweep_matches_two_pass_reference(rng):
    """Test one sweep on a 4 x 76 matrix against a direct mean/std computation"""
    x = rng.normal(2.0, 4.0, size=(4, 76))
    over_time = (x - x.mean(axis=0)) / x.std(axis=0)
    expected = (over_time - over_time.mean(axis=1, keepdims=True)) / over_time.std(axis=1, keepdims=True)
    np.testing.assert_allclose(normalize_frames(x, max_sweeps=1), expected, atol=1e-12)

    intermediate = _standardize(x, axis=0, eps=STD_EPS)
    np.testing.assert_allclose(intermediate.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(intermediate, over_time, atol=1e-12)


def test_normalize_is_idempotent(rng):
    """Test normalizing a normalized trial changes nothing"""
    once = normalize(_trial(rng.normal(1.0, 3.0, size=(30, 5)) * np.arange(1, 6)))
    twice = normalize(once)
    np.testing.assert_allclose(twice.frames, once.frames, atol=1e-6)


def test_constant_trial_maps_to_zero():
    """Test zero-variance slices normalize to 0 instead of NaN"""
    y = normalize_frames(np.full((5, 4), 2.5))
    np.testing.assert_array_equal(y, 0.0)


def test_normalize_needs_two_frames():
    """Test a one-frame trial cannot be normalized"""
    with pytest.raises(DegenerateTrialError):
        normalize_frames(np.ones((1, 4)))


def test_normalize_rejects_zero_sweeps(rng):
    """Test max_sweeps below 1"""
    with pytest.raises(RangeError):
        normalize_frames(rng.normal(size=(5, 3)), max_sweeps=0)


# Segmentation

def test_segment_drops_remainder(rng):
    """Test 10 frames with L = 4 give two segments"""
    trial = _trial(rng.normal(size=(10, 3)))
    segments = segment(trial, 4)
    assert [s.index for s in segments] == [1, 2]
    assert all(s.length == 4 for s in segments)
    assert all(s.parent_trial == trial.trial_id for s in segments)
    np.testing.assert_array_equal(segments[1].values, trial.frames[4:8])


def test_segment_conserves_frames(rng):
    """Test segments cover the first floor(T / L) * L frames in order and drop only the remainder"""
    for T in range(4, 30):
        for L in (1, 3, 4, 7):
            if L > T:
                continue
            trial = _trial(rng.normal(size=(T, 2)))
            segments = segment(trial, L)
            assert len(segments) == T // L
            joined = np.concatenate([s.values for s in segments])
            assert len(joined) + T % L == T
            np.testing.assert_array_equal(joined, trial.frames[:len(joined)])


def test_segment_exact_multiple(rng):
    """Test T = 3L gives three segments covering every frame"""
    trial = _trial(rng.normal(size=(12, 3)))
    segments = segment(trial, 4)
    np.testing.assert_array_equal(np.concatenate([s.values for s in segments]), trial.frames)


def test_segment_too_short(rng):
    """Test a trial shorter than one segment"""
    with pytest.raises(TooShortError):
        segment(_trial(rng.normal(size=(3, 3))), 4)


def test_segment_length_must_be_positive(rng):
    """Test L = 0"""
    with pytest.raises(RangeError):
        segment(_trial(rng.normal(size=(8, 3))), 0)


def test_prepare_trial_normalizes_first(rng):
    """Test prepared segments come from the normalized trial"""
    segments = prepare_trial(_trial(rng.normal(5.0, 3.0, size=(9, 4))), 3)
    assert len(segments) == 3
    for s in segments:
        np.testing.assert_allclose(s.values.mean(axis=1), 0.0, atol=1e-9)


# Folds

def test_loso_folds_by_repetition(synthetic_trials):
    """Test LOSO holds out one repetition per fold"""
    folds = make_folds([t.trial for t in synthetic_trials], CVScheme.LOSO)
    assert [f.fold_key for f in folds] == ["1", "2"]
    for fold in folds:
        assert all(i.endswith(f"00{fold.fold_key}") for i in fold.test_ids)
        assert not set(fold.train_ids) & set(fold.test_ids)


def test_louo_folds_partition_trials(synthetic_trials):
    """Test LOUO test sets partition the trial ids"""
    folds = make_folds([t.trial for t in synthetic_trials], CVScheme.LOUO)
    assert [f.fold_key for f in folds] == ["B", "C", "D"]
    held_out = sorted(i for f in folds for i in f.test_ids)
    assert held_out == sorted(t.trial_id for t in synthetic_trials)


def test_single_subject_cannot_be_louo(full_width_trials):
    """Test LOUO with one subject"""
    with pytest.raises(InsufficientGroupsError):
        make_folds([t.trial for t in full_width_trials], CVScheme.LOUO)


# Synthetic data

def test_synthetic_trials_are_seeded():
    """Test the same seed reproduces the same cohort"""
    a = generate_synthetic_trials(subjects=2, repetitions=1, frames=(8, 8), dim=4, seed=11)
    b = generate_synthetic_trials(subjects=2, repetitions=1, frames=(8, 8), dim=4, seed=11)
    for x, y in zip(a, b):
        assert x.labels == y.labels
        np.testing.assert_array_equal(x.trial.frames, y.trial.frames)
