"""Named parameter store and seeded initialization."""

from typing import Dict, Iterator, List, Optional, Tuple
import logging

import numpy as np

from autodiff import Tensor
from errors import ConfigError
from models.configs import ModelConfig

logger = logging.getLogger(__name__)


class ModelParams:
    """Trainable tensors plus batch-norm running statistics, keyed by name.

    Names follow the block structure, e.g. ``fusion.0.self_attn.w_q`` or
    ``heads.3.fc1.w``. Iteration order is the initialization order and is what
    the optimizer, the checkpoint writer and the gradient check rely on.
    """

    def __init__(
        self,
        config: ModelConfig,
        tensors: Dict[str, Tensor],
        buffers: Optional[Dict[str, np.ndarray]] = None,
    ):
        self.config = config
        self.tensors = tensors
        self.buffers = buffers or {}

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __len__(self) -> int:
        return len(self.tensors)

    def named_parameters(self) -> Iterator[Tuple[str, Tensor]]:
        return iter(self.tensors.items())

    def parameters(self) -> List[Tensor]:
        return list(self.tensors.values())

    def num_parameters(self) -> int:
        return sum(t.size for t in self.tensors.values())

    def zero_grad(self) -> None:
        for t in self.tensors.values():
            t.zero_grad()

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(t.values)) for t in self.tensors.values())

    def copy(self) -> "ModelParams":
        tensors = {
            name: Tensor(t.values.copy(), requires_grad=t.requires_grad, name=name)
            for name, t in self.tensors.items()
        }
        buffers = {name: b.copy() for name, b in self.buffers.items()}
        return ModelParams(self.config, tensors, buffers)


class _Builder:
    """Draws parameters from one generator in a fixed order."""

    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)
        self.tensors: Dict[str, Tensor] = {}
        self.buffers: Dict[str, np.ndarray] = {}

    def add(self, name: str, values: np.ndarray) -> None:
        self.tensors[name] = Tensor(values, requires_grad=True, name=name)

    def linear(self, prefix: str, fan_in: int, fan_out: int, weight: str = "w", bias: str = "b") -> None:
        bound = 1.0 / np.sqrt(fan_in)
        self.add(f"{prefix}.{weight}", self.rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        self.add(f"{prefix}.{bias}", self.rng.uniform(-bound, bound, size=(fan_out,)))

    def norm(self, prefix: str, dim: int) -> None:
        self.add(f"{prefix}.gamma", np.ones(dim))
        self.add(f"{prefix}.beta", np.zeros(dim))

    def attention(self, prefix: str, dim: int, width: int) -> None:
        for proj in ("q", "k", "v"):
            self.linear(prefix, dim, width, weight=f"w_{proj}", bias=f"b_{proj}")
        self.linear(prefix, width, dim, weight="w_o", bias="b_o")


def init_model(config: ModelConfig) -> ModelParams:
    """Initialize every parameter from ``config.seed``.

    Weights and biases are uniform in +-1/sqrt(fan_in); normalization scales start
    at one and shifts at zero; running statistics start at mean 0, variance 1.
    """
    if not isinstance(config, ModelConfig):
        raise ConfigError(f"expected ModelConfig, got {type(config).__name__}")

    D = config.input_dim
    A = config.attention_dim
    E = config.ff_expansion * D
    b = _Builder(config.seed)

    for i in range(config.num_fusion_modules):
        prefix = f"fusion.{i}"
        b.attention(f"{prefix}.self_attn", D, A)
        b.norm(f"{prefix}.norm1", D)
        b.attention(f"{prefix}.cross_attn", D, A)
        b.norm(f"{prefix}.norm2", D)
        b.linear(f"{prefix}.ff", D, E, weight="w1", bias="b1")
        b.linear(f"{prefix}.ff", E, D, weight="w2", bias="b2")
        b.norm(f"{prefix}.norm3", D)

    for n in range(config.num_categories):
        prefix = f"heads.{n}"
        b.norm(f"{prefix}.bn", D)
        b.buffers[f"{prefix}.bn.running_mean"] = np.zeros(D)
        b.buffers[f"{prefix}.bn.running_var"] = np.ones(D)
        b.linear(f"{prefix}.fc1", D, config.mlp_hidden)
        b.linear(f"{prefix}.fc2", config.mlp_hidden, config.num_classes)

    params = ModelParams(config, b.tensors, b.buffers)
    logger.debug(f"Initialized {len(params)} tensors, {params.num_parameters()} parameters (seed {config.seed})")
    return params


def count_parameters(config: ModelConfig) -> int:
    """Closed-form number of trainable scalars for ``config``."""
    D = config.input_dim
    A = config.attention_dim
    E = config.ff_expansion * D
    attention = 3 * (D * A + A) + (A * D + D)
    norm = 2 * D
    feed_forward = (D * E + E) + (E * D + D)
    fusion = 2 * attention + 3 * norm + feed_forward
    head = norm + (D * config.mlp_hidden + config.mlp_hidden) + (config.mlp_hidden * config.num_classes + config.num_classes)
    return config.num_fusion_modules * fusion + config.num_categories * head
