"""Test suite for losses, augmentation, Adam and the training loop"""

import numpy as np
import pandas as pd
import pytest

from autodiff import Tensor
from dataset.synthetic import generate_synthetic_trials
from errors import EmptyFoldError, EmptySequenceError, NonFiniteLossError, RangeError, ShapeMismatchError
from evaluation.metrics import spearman
from evaluation.predict import predict_trial
from models.configs import TrainConfig
from models.dataset import Segment, Task, TrialLabels
from network.checkpoint import load_checkpoint
from network.params import init_model
from training.augment import add_gaussian_noise, augment, augment_frames, flip
from training.losses import class_weights, compute_loss, smooth_labels
from training.optimizer import AdamState, adam_step
from training.trainer import fold_rng, train


# Label smoothing and class weights

def test_smooth_labels_spreads_over_other_classes():
    """Test score 3 with smoothing 0.3"""
    np.testing.assert_allclose(smooth_labels(3, 0.3), [0.075, 0.075, 0.7, 0.075, 0.075])


def test_smooth_labels_without_smoothing_is_one_hot():
    """Test smoothing 0 gives the one-hot target"""
    np.testing.assert_array_equal(smooth_labels(5, 0.0), [0, 0, 0, 0, 1])


@pytest.mark.parametrize("y,smoothing", [(0, 0.1), (6, 0.1), (3, 1.0), (3, -0.1)])
def test_smooth_labels_range(y, smoothing):
    """Test out-of-range scores and smoothing values"""
    with pytest.raises(RangeError):
        smooth_labels(y, smoothing)


def test_class_weights_inverse_frequency():
    """Test weights are total / (5 * count), absent classes take the largest"""
    labels = [TrialLabels.from_osats([1] * 5), TrialLabels.from_osats([1] * 5), TrialLabels.from_osats([2] * 5)]
    weights = class_weights(labels)
    assert weights.shape == (5, 5)
    np.testing.assert_allclose(weights[0], [0.3, 0.6, 0.6, 0.6, 0.6])


def test_class_weights_empty_fold():
    """Test a fold without training trials"""
    with pytest.raises(EmptyFoldError):
        class_weights([])


# Loss

def test_loss_of_uniform_logits():
    """Test zero logits with unit weights cost 5 * log(5)"""
    loss = compute_loss(Tensor(np.zeros((5, 5))), TrialLabels.from_osats([3] * 5), np.ones((5, 5)), [], 0.0)
    assert loss.item() == pytest.approx(5 * np.log(5))


def test_loss_adds_l2_term():
    """Test the L2 penalty is lambda times the sum of squares"""
    labels = TrialLabels.from_osats([3] * 5)
    base = compute_loss(Tensor(np.zeros((5, 5))), labels, np.ones((5, 5)), [], 0.0).item()
    penalized = compute_loss(Tensor(np.zeros((5, 5))), labels, np.ones((5, 5)), [Tensor([1.0, 2.0])], 0.5).item()
    assert penalized - base == pytest.approx(2.5)


def test_loss_rewards_correct_class():
    """Test confident correct logits cost less than confident wrong ones"""
    labels = TrialLabels.from_osats([2] * 5)
    right = np.full((5, 5), -5.0)
    right[:, 1] = 5.0
    wrong = np.full((5, 5), -5.0)
    wrong[:, 4] = 5.0
    weights = np.ones((5, 5))
    assert compute_loss(Tensor(right), labels, weights, [], 0.0, smoothing=0.3).item() < \
        compute_loss(Tensor(wrong), labels, weights, [], 0.0, smoothing=0.3).item()


def test_loss_shape_check():
    """Test logits of the wrong shape"""
    with pytest.raises(ShapeMismatchError):
        compute_loss(Tensor(np.zeros((4, 5))), TrialLabels.from_osats([3] * 5), np.ones((5, 5)), [], 0.0)


# Augmentation

def test_flip_reverses_time():
    """Test flip reverses frame order"""
    frames = np.arange(12.0).reshape(4, 3)
    np.testing.assert_array_equal(flip(frames), frames[::-1])


def test_noise_scales_with_feature_std(rng):
    """Test a constant feature receives no noise"""
    frames = np.column_stack([np.full(50, 3.0), rng.normal(size=50)])
    noisy = add_gaussian_noise(frames, rng)
    np.testing.assert_array_equal(noisy[:, 0], 3.0)
    assert not np.allclose(noisy[:, 1], frames[:, 1])


def test_augment_rate_zero_is_identity_and_draws_twice(rng):
    """Test rate 0 leaves frames untouched but still advances the generator"""
    frames = rng.normal(size=(8, 3))
    a = np.random.default_rng(5)
    b = np.random.default_rng(5)
    np.testing.assert_array_equal(augment_frames(frames, a, 0.0), frames)
    b.random()
    b.random()
    assert a.random() == b.random()


def test_augment_rate_one_flips_and_adds_noise(rng):
    """Test rate 1 always applies both transforms"""
    frames = np.tile(np.arange(8.0)[:, None], (1, 3))
    out = augment_frames(frames, np.random.default_rng(0), 1.0, noise_scale=0.01)
    assert out.shape == frames.shape
    assert out[0, 0] > out[-1, 0]
    assert not np.array_equal(out, frames[::-1])


def test_noise_mean_is_zero(rng):
    """Test the added noise averages to zero within three standard errors"""
    frames = np.column_stack([np.linspace(-1.0, 1.0, 10_000), rng.normal(size=10_000)])
    noise = add_gaussian_noise(frames, np.random.default_rng(21), scale=0.5) - frames
    sigma = 0.5 * frames.std(axis=0)
    assert np.all(np.abs(noise.mean(axis=0)) < 3 * sigma / np.sqrt(len(frames)))
    np.testing.assert_allclose(noise.std(axis=0), sigma, rtol=0.05)


def test_augment_rate_out_of_range(rng):
    """Test rate above 1"""
    with pytest.raises(RangeError):
        augment_frames(rng.normal(size=(4, 2)), rng, 1.5)


def test_augment_segments_preserves_layout(rng):
    """Test augmentation over segments keeps count, indices and length"""
    segments = [Segment(values=rng.normal(size=(4, 3)), index=i + 1, parent_trial="Knot_Tying_B001") for i in range(3)]
    out = augment(segments, np.random.default_rng(1), 1.0)
    assert [s.index for s in out] == [1, 2, 3]
    assert all(s.values.shape == (4, 3) for s in out)


def test_augment_needs_segments(rng):
    """Test an empty trial"""
    with pytest.raises(EmptySequenceError):
        augment([], rng, 0.5)


# Adam

def test_adam_first_step_moves_by_learning_rate(tiny_params):
    """Test the first bias-corrected step is lr * sign(g)"""
    name = "heads.0.fc2.b"
    before = tiny_params[name].values.copy()
    other = tiny_params["heads.1.fc2.b"].values.copy()
    state = AdamState.for_params(tiny_params)

    grads = {name: np.array([1.0, -2.0, 0.5, 3.0, -1.0])}
    adam_step(tiny_params, grads, state, lr=0.01)

    np.testing.assert_allclose(tiny_params[name].values - before, -0.01 * np.sign(grads[name]), rtol=1e-6)
    np.testing.assert_array_equal(tiny_params["heads.1.fc2.b"].values, other)
    assert state.step == 1


def test_adam_zero_gradients_leave_parameters(tiny_params):
    """Test a step with all-zero gradients changes nothing but the step counter"""
    before = {name: t.values.copy() for name, t in tiny_params.named_parameters()}
    state = AdamState.for_params(tiny_params)
    grads = {name: np.zeros_like(t.values) for name, t in tiny_params.named_parameters()}
    for _ in range(3):
        adam_step(tiny_params, grads, state, lr=0.1)
    for name, t in tiny_params.named_parameters():
        np.testing.assert_array_equal(t.values, before[name])
    assert state.step == 3


def test_adam_rejects_bad_gradients(tiny_params):
    """Test unknown names, wrong shapes and non-positive learning rates"""
    state = AdamState.for_params(tiny_params)
    with pytest.raises(ShapeMismatchError):
        adam_step(tiny_params, {"missing": np.zeros(1)}, state, lr=0.01)
    with pytest.raises(ShapeMismatchError):
        adam_step(tiny_params, {"heads.0.fc2.b": np.zeros(3)}, state, lr=0.01)
    with pytest.raises(RangeError):
        adam_step(tiny_params, {}, state, lr=0.0)


# Training loop

def test_fold_rng_differs_by_fold():
    """Test each fold draws its own stream"""
    assert fold_rng(0, 0).random() != fold_rng(0, 1).random()
    assert fold_rng(3, 2).random() == fold_rng(3, 2).random()


def test_train_writes_checkpoint_and_loss_log(tmp_path, synthetic_trials, tiny_config, fast_train_config):
    """Test a short run records one finite loss per epoch"""
    result = train(
        synthetic_trials, tiny_config, fast_train_config,
        fold_key="1", checkpoint_path=tmp_path / "fold.ckpt", loss_log_path=tmp_path / "fold.csv",
    )
    assert len(result.loss_history) == 3
    assert all(np.isfinite(result.loss_history))

    log = pd.read_csv(tmp_path / "fold.csv", dtype={"fold": str}, float_precision="round_trip")
    assert list(log.columns) == ["epoch", "loss", "fold"]
    assert log["epoch"].tolist() == [1, 2, 3]
    assert log["loss"].tolist() == result.loss_history
    assert set(log["fold"]) == {"1"}

    restored = load_checkpoint(tmp_path / "fold.ckpt", expected_config=tiny_config)
    np.testing.assert_array_equal(restored["heads.0.fc1.w"].values, result.params["heads.0.fc1.w"].values)


def test_train_is_deterministic(synthetic_trials, tiny_config, fast_train_config):
    """Test identical config and seed reproduce the loss history exactly"""
    a = train(synthetic_trials, tiny_config, fast_train_config, fold_index=2)
    b = train(synthetic_trials, tiny_config, fast_train_config, fold_index=2)
    assert a.loss_history == b.loss_history
    np.testing.assert_array_equal(a.params["fusion.2.ff.w2"].values, b.params["fusion.2.ff.w2"].values)


def test_train_empty_fold(tiny_config, fast_train_config):
    """Test training without trials"""
    with pytest.raises(EmptyFoldError):
        train([], tiny_config, fast_train_config)


def test_train_aborts_on_non_finite_loss(synthetic_trials, tiny_config, fast_train_config):
    """Test a NaN loss stops training with a diagnostic"""
    params = init_model(tiny_config)
    params["heads.0.fc2.b"].values[:] = np.nan
    with pytest.raises(NonFiniteLossError):
        train(synthetic_trials, tiny_config, fast_train_config, params=params)


@pytest.mark.slow
def test_overfits_training_trials(tiny_config):
    """Test eight trials are fit to under a tenth of the initial loss with a GRS rank correlation of 0.95"""
    trials = generate_synthetic_trials(
        tasks=(Task.KNOT_TYING,), subjects=4, repetitions=2, frames=(12, 24), dim=6, seed=7
    )
    assert len(trials) == 8
    config = TrainConfig(
        epochs=500, batch_size=8, learning_rate=1e-3,
        augment_rate=0.0, label_smoothing=0.0, lambda_l2=0.0, log_every=100,
    )
    result = train(trials, tiny_config, config)
    history = result.loss_history
    assert history[-1] < 0.1 * history[0]

    predicted = [predict_trial(result.params, t.trial).grs for t in trials]
    assert spearman(predicted, [t.labels.grs for t in trials]) >= 0.95
