"""Building blocks of the fusion backbone and the classification heads."""

from typing import Optional

from autodiff import Tensor
from autodiff import functional as F
from network.params import ModelParams


def linear(x: Tensor, w: Tensor, b: Optional[Tensor] = None) -> Tensor:
    out = F.matmul(x, w)
    return F.add(out, b) if b is not None else out


def _split_heads(x: Tensor, heads: int) -> Tensor:
    """(L, H*dh) -> (H, L, dh)"""
    length, width = x.shape
    return F.transpose(F.reshape(x, (length, heads, width // heads)), (1, 0, 2))


def _merge_heads(x: Tensor) -> Tensor:
    """(H, L, dh) -> (L, H*dh)"""
    heads, length, dh = x.shape
    return F.reshape(F.transpose(x, (1, 0, 2)), (length, heads * dh))


def multi_head_attention(params: ModelParams, prefix: str, query: Tensor, context: Tensor) -> Tensor:
    """Multi-head attention of ``query`` rows over ``context`` rows.

    Self-attention passes the same tensor twice; cross-attention passes the
    previous hidden state as ``context``.
    """
    heads = params.config.heads
    q = _split_heads(linear(query, params[f"{prefix}.w_q"], params[f"{prefix}.b_q"]), heads)
    k = _split_heads(linear(context, params[f"{prefix}.w_k"], params[f"{prefix}.b_k"]), heads)
    v = _split_heads(linear(context, params[f"{prefix}.w_v"], params[f"{prefix}.b_v"]), heads)
    attended = F.scaled_dot_product_attention(q, k, v)
    return linear(_merge_heads(attended), params[f"{prefix}.w_o"], params[f"{prefix}.b_o"])


def feed_forward(params: ModelParams, prefix: str, x: Tensor) -> Tensor:
    hidden = F.relu(linear(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"]))
    return linear(hidden, params[f"{prefix}.w2"], params[f"{prefix}.b2"])


def layer_norm(params: ModelParams, prefix: str, x: Tensor) -> Tensor:
    return F.layernorm(x, params[f"{prefix}.gamma"], params[f"{prefix}.beta"], eps=params.config.ln_eps)


def fusion_module(params: ModelParams, index: int, x: Tensor, z_prev: Tensor) -> Tensor:
    """Post-norm block: self-attention, cross-attention on ``z_prev``, feed-forward."""
    prefix = f"fusion.{index}"
    x = layer_norm(params, f"{prefix}.norm1", F.add(x, multi_head_attention(params, f"{prefix}.self_attn", x, x)))
    x = layer_norm(params, f"{prefix}.norm2", F.add(x, multi_head_attention(params, f"{prefix}.cross_attn", x, z_prev)))
    return layer_norm(params, f"{prefix}.norm3", F.add(x, feed_forward(params, f"{prefix}.ff", x)))


def classification_head(params: ModelParams, index: int, pooled: Tensor, training: bool) -> Tensor:
    """Batch norm, ReLU, two fully connected layers: (S, D) -> (S, classes).

    The batch norm always normalizes with the running statistics. In training
    they are first refreshed from ``pooled``, so one trial's segments update the
    statistics without being normalized against each other.
    """
    prefix = f"heads.{index}"
    running_mean = params.buffers[f"{prefix}.bn.running_mean"]
    running_var = params.buffers[f"{prefix}.bn.running_var"]
    if training:
        F.update_running_stats(pooled.values, running_mean, running_var, params.config.bn_momentum)

    h = F.batchnorm(
        pooled,
        params[f"{prefix}.bn.gamma"],
        params[f"{prefix}.bn.beta"],
        running_mean,
        running_var,
        training=False,
        eps=params.config.bn_eps,
    )
    h = F.relu(h)
    h = F.relu(linear(h, params[f"{prefix}.fc1.w"], params[f"{prefix}.fc1.b"]))
    return linear(h, params[f"{prefix}.fc2.w"], params[f"{prefix}.fc2.b"])
