"""Central finite-difference verification of analytic gradients."""

from typing import Callable, List, Sequence, Union
import logging

import numpy as np

from autodiff.tensor import Tensor, backward, get_tape, no_grad

logger = logging.getLogger(__name__)


def finite_difference_check(
    f: Callable[..., Tensor],
    x: Union[Tensor, Sequence[Tensor]],
    step: float = 1e-5,
) -> float:
    """Compare reverse-mode gradients of a scalar function against central differences.

    Args:
        f: Function of the tensors in ``x`` returning a scalar Tensor. Called as
            ``f(x)`` when a single tensor is given, ``f(*x)`` otherwise.
        x: Leaf tensor(s) to differentiate against; perturbed in place and restored.
        step: Finite-difference step.

    Returns:
        max over coordinates of |analytic - central| / max(1, |central|)
    """
    single = isinstance(x, Tensor)
    leaves: List[Tensor] = [x] if single else list(x)

    def evaluate() -> Tensor:
        return f(leaves[0]) if single else f(*leaves)

    for leaf in leaves:
        leaf.values = np.ascontiguousarray(leaf.values)
        leaf.requires_grad = True
        leaf.zero_grad()

    get_tape().clear()
    loss = evaluate()
    if loss.is_leaf:
        # constant in every input
        analytic = [np.zeros_like(leaf.values) for leaf in leaves]
    else:
        backward(loss, inputs=leaves)
        analytic = [leaf.grad.copy() for leaf in leaves]

    worst = 0.0
    with no_grad():
        for leaf, grad in zip(leaves, analytic):
            flat = leaf.values.reshape(-1)
            grad_flat = grad.reshape(-1)
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + step
                plus = evaluate().item()
                flat[i] = original - step
                minus = evaluate().item()
                flat[i] = original
                central = (plus - minus) / (2.0 * step)
                error = abs(grad_flat[i] - central) / max(1.0, abs(central))
                worst = max(worst, error)

    for leaf in leaves:
        leaf.zero_grad()
    logger.debug(f"Finite-difference check over {sum(l.size for l in leaves)} coordinates: max error {worst:.3e}")
    return worst
