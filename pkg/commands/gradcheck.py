"""gradcheck: finite-difference verification of the full loss and every op."""

from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple
import json
import logging

import numpy as np

from autodiff import Tensor, finite_difference_check, functional as F, get_tape
from dataset.preprocessing import prepare_trial
from dataset.synthetic import generate_synthetic_trials
from models.configs import ModelConfig
from network.params import init_model
from network.rtrans import forward_trial
from training.losses import class_weights, compute_loss

logger = logging.getLogger(__name__)

OP_THRESHOLD = 1e-4

# L = 4, D = 6, two segments per trial
TINY_CONFIG = dict(segment_length=4, input_dim=6, heads=2, mlp_hidden=8)
TINY_FRAMES = 8


def _tensor(rng: np.random.Generator, *shape: int) -> Tensor:
    return Tensor(rng.normal(size=shape), requires_grad=True)


def op_cases(rng: np.random.Generator) -> List[Tuple[str, Callable[..., Tensor], List[Tensor]]]:
    """(name, scalar function, inputs) for every differentiable op."""
    weights = rng.normal(size=(3, 4))
    running_mean = rng.normal(size=4)
    running_var = rng.uniform(0.5, 2.0, size=4)

    def weighted(t: Tensor) -> Tensor:
        return F.sum(F.mul(t, np.resize(weights, t.shape)))

    return [
        ("add", lambda a, b: weighted(F.add(a, b)), [_tensor(rng, 3, 4), _tensor(rng, 4)]),
        ("sub", lambda a, b: weighted(F.sub(a, b)), [_tensor(rng, 3, 4), _tensor(rng, 3, 1)]),
        ("mul", lambda a, b: weighted(F.mul(a, b)), [_tensor(rng, 3, 4), _tensor(rng, 1, 4)]),
        ("scale", lambda a: weighted(F.scale(a, 0.7)), [_tensor(rng, 3, 4)]),
        ("log", lambda a: weighted(F.log(F.add(F.mul(a, a), 1.0))), [_tensor(rng, 3, 4)]),
        ("relu", lambda a: weighted(F.relu(a)), [_tensor(rng, 3, 4)]),
        ("matmul", lambda a, b: weighted(F.matmul(a, b)), [_tensor(rng, 3, 5), _tensor(rng, 5, 4)]),
        ("transpose", lambda a: weighted(F.transpose(a)), [_tensor(rng, 4, 3)]),
        ("reshape", lambda a: weighted(F.reshape(a, (3, 4))), [_tensor(rng, 2, 6)]),
        ("getitem", lambda a: weighted(F.getitem(a, slice(1, 4))), [_tensor(rng, 5, 4)]),
        ("stack", lambda a, b, c: weighted(F.stack([a, b, c], axis=0)), [_tensor(rng, 4) for _ in range(3)]),
        ("sum", lambda a: weighted(F.sum(a, axis=0, keepdims=True)), [_tensor(rng, 3, 4)]),
        ("mean", lambda a: weighted(F.mean(a, axis=1, keepdims=True)), [_tensor(rng, 3, 4)]),
        ("sum_squares", lambda a: F.sum_squares(a), [_tensor(rng, 3, 4)]),
        ("softmax", lambda a: weighted(F.softmax(a, axis=-1)), [_tensor(rng, 3, 4)]),
        ("log_softmax", lambda a: weighted(F.log_softmax(a, axis=-1)), [_tensor(rng, 3, 4)]),
        ("layernorm", lambda x, g, b: weighted(F.layernorm(x, g, b)), [_tensor(rng, 3, 4), _tensor(rng, 4), _tensor(rng, 4)]),
        (
            "batchnorm",
            lambda x, g, b: weighted(F.batchnorm(x, g, b, running_mean.copy(), running_var.copy(), training=True)),
            [_tensor(rng, 3, 4), _tensor(rng, 4), _tensor(rng, 4)],
        ),
        (
            "batchnorm[eval]",
            lambda x, g, b: weighted(F.batchnorm(x, g, b, running_mean, running_var, training=False)),
            [_tensor(rng, 3, 4), _tensor(rng, 4), _tensor(rng, 4)],
        ),
        (
            "attention",
            lambda q, k, v: weighted(F.scaled_dot_product_attention(q, k, v)),
            [_tensor(rng, 3, 2), _tensor(rng, 5, 2), _tensor(rng, 5, 4)],
        ),
    ]


def check_ops(seed: int = 0) -> Dict[str, float]:
    """Max relative error per op on random inputs."""
    rng = np.random.default_rng(seed)
    return {name: finite_difference_check(f, inputs) for name, f, inputs in op_cases(rng)}


def tiny_loss_problem(seed: int = 0):
    """Parameters and a loss closure for the tiny configuration."""
    config = ModelConfig(**TINY_CONFIG, seed=seed)
    params = init_model(config)
    labelled = generate_synthetic_trials(
        subjects=1, repetitions=1, frames=(TINY_FRAMES, TINY_FRAMES), dim=config.input_dim, seed=seed
    )[0]
    segments = prepare_trial(labelled.trial, config.segment_length)
    weights = class_weights([labelled.labels])

    def loss(*_: Tensor) -> Tensor:
        _, avg = forward_trial(params, segments, training=False)
        return compute_loss(avg, labelled.labels, weights, params, lambda_l2=0.01, smoothing=0.3)

    return params, loss


def cmd_gradcheck(threshold: float = 1e-3, dump_tape: Optional[Path] = None, seed: int = 0) -> int:
    """Check the loss gradient over every parameter, then every op.

    Prints one JSON line and returns the process exit code.
    """
    params, loss = tiny_loss_problem(seed)
    model_error = finite_difference_check(loss, params.parameters())
    op_errors = check_ops(seed)
    failed_ops = sorted(name for name, error in op_errors.items() if not error < OP_THRESHOLD)
    passed = model_error < threshold and not failed_ops

    if dump_tape is not None:
        tape = get_tape()
        tape.clear()
        loss()
        dump_tape = Path(dump_tape)
        dump_tape.parent.mkdir(parents=True, exist_ok=True)
        dump_tape.write_text(tape.dump() + "\n")
        tape.clear()
        logger.info(f"Wrote tape dump to {dump_tape}")

    for name, error in op_errors.items():
        logger.debug(f"op {name}: {error:.3e}")
    if passed:
        logger.info(f"Gradient check passed over {params.num_parameters()} parameters: {model_error:.3e}")
    else:
        logger.error(f"Gradient check failed: model {model_error:.3e}, ops {failed_ops}")

    print(json.dumps({
        "passed": passed,
        "max_relative_error": model_error,
        "threshold": threshold,
        "num_parameters": params.num_parameters(),
        "max_op_error": max(op_errors.values()),
        "failed_ops": failed_ops,
    }))
    return 0 if passed else 1
