"""Pytest configuration and fixtures for R-Trans tests"""

import pytest
import os

# Set test environment variables BEFORE any imports
os.environ["ENVIRONMENT"] = "test"
os.environ.pop("SENTRY_DSN", None)
os.environ.pop("RTRANS_DATASET_ROOT", None)

# Now we can import after env vars are set
import numpy as np

from dataset.synthetic import generate_synthetic_trials
from models.configs import ModelConfig, TrainConfig
from models.dataset import Task
from network.params import init_model

TINY = dict(segment_length=4, input_dim=6, heads=2, mlp_hidden=8)


@pytest.fixture
def rng():
    """Seeded generator"""
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    """Small architecture: L = 4, D = 6, two heads"""
    return ModelConfig(**TINY)


@pytest.fixture
def tiny_params(tiny_config):
    """Freshly initialized parameters for the tiny architecture"""
    return init_model(tiny_config)


@pytest.fixture
def fast_train_config():
    """A few epochs of training with a usable learning rate"""
    return TrainConfig(epochs=3, batch_size=4, learning_rate=1e-3, log_every=1)


@pytest.fixture
def synthetic_trials():
    """3 subjects x 2 repetitions of knot tying, 6 features, 12-24 frames"""
    return generate_synthetic_trials(
        tasks=(Task.KNOT_TYING,), subjects=3, repetitions=2, frames=(12, 24), dim=6, seed=7
    )


@pytest.fixture
def full_width_trials():
    """Two 76-feature trials that can be written in the JIGSAWS layout"""
    return generate_synthetic_trials(
        tasks=(Task.KNOT_TYING,), subjects=1, repetitions=2, frames=(10, 12), dim=76, seed=3
    )


@pytest.fixture
def run_dir(tmp_path):
    """Output directory for a command run"""
    out = tmp_path / "run"
    out.mkdir()
    return out
