"""Adam with bias correction over named parameters."""

from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from errors import RangeError, ShapeMismatchError
from models.configs import TrainConfig
from network.params import ModelParams


class AdamState(BaseModel):
    """First and second moments per parameter name, and the step counter."""
    m: Dict[str, np.ndarray]
    v: Dict[str, np.ndarray]
    step: int = Field(0, ge=0)
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    class Config:
        arbitrary_types_allowed = True

    @classmethod
    def for_params(cls, params: ModelParams, config: Optional[TrainConfig] = None) -> "AdamState":
        config = config or TrainConfig()
        return cls(
            m={name: np.zeros_like(t.values) for name, t in params.named_parameters()},
            v={name: np.zeros_like(t.values) for name, t in params.named_parameters()},
            beta1=config.adam_beta1,
            beta2=config.adam_beta2,
            eps=config.adam_eps,
        )


def adam_step(
    params: ModelParams,
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> Tuple[ModelParams, AdamState]:
    """One Adam update, in place.

    Parameters missing from ``grads`` are treated as having zero gradient.
    """
    if lr <= 0:
        raise RangeError(f"learning rate must be positive, got {lr}")
    for name, g in grads.items():
        if name not in params:
            raise ShapeMismatchError(f"adam[{name}] unknown parameter", np.shape(g))
        if np.shape(g) != params[name].shape:
            raise ShapeMismatchError(f"adam[{name}]", params[name].shape, np.shape(g))

    state.step += 1
    c1 = 1.0 - state.beta1 ** state.step
    c2 = 1.0 - state.beta2 ** state.step
    for name, t in params.named_parameters():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(t.values)
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        t.values -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params, state
