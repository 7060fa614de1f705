"""Dense float64 tensors with a reverse-mode tape.

Each thread owns one tape. An operation is recorded when gradient recording is
enabled and at least one input requires a gradient; the tape is therefore in
topological order. ``backward`` walks it in reverse and clears it.
"""

from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple
import logging
import threading

import numpy as np

from errors import (
    DisconnectedGraphError,
    EmptyTapeError,
    NonFiniteError,
    NonScalarLossError,
)

logger = logging.getLogger(__name__)

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """A float64 array that can take part in reverse-mode differentiation."""

    def __init__(self, values, requires_grad: bool = False, name: Optional[str] = None):
        self.values = np.array(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self.op = "leaf"
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def zero_grad(self) -> None:
        self.grad = None

    def item(self) -> float:
        return float(self.values.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.values

    def backward(self, inputs: Optional[Sequence["Tensor"]] = None, strict: bool = False) -> List["Tensor"]:
        return backward(self, inputs=inputs, strict=strict)

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self.op!r}, requires_grad={self.requires_grad}{label})"

    # Operator sugar; the ops live in autodiff.functional
    def __add__(self, other):
        from autodiff.functional import add
        return add(self, other)

    def __sub__(self, other):
        from autodiff.functional import sub
        return sub(self, other)

    def __mul__(self, other):
        from autodiff.functional import mul, scale
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return mul(self, other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        from autodiff.functional import matmul
        return matmul(self, other)

    def __getitem__(self, key):
        from autodiff.functional import getitem
        return getitem(self, key)


class Tape:
    """Ordered record of the operations of one thread."""

    def __init__(self):
        self.nodes: List[Tensor] = []
        self.enabled = True
        self.check_finite = False

    def record(self, node: Tensor) -> None:
        self.nodes.append(node)

    def clear(self) -> None:
        for node in self.nodes:
            node._parents = ()
            node._backward = None
        self.nodes = []

    def __len__(self) -> int:
        return len(self.nodes)

    def dump(self) -> str:
        """Text graph of the recorded operations, one line per node."""
        ids: Dict[int, str] = {}

        def label(t: Tensor) -> str:
            if id(t) not in ids:
                if t.is_leaf:
                    ids[id(t)] = t.name or f"leaf{len(ids)}"
                else:
                    ids[id(t)] = f"%{len(ids)}"
            return ids[id(t)]

        lines = []
        for node in self.nodes:
            inputs = ", ".join(f"{label(p)}{list(p.shape)}" for p in node._parents)
            lines.append(f"{label(node)}{list(node.shape)} = {node.op}({inputs})")
        return "\n".join(lines)


_local = threading.local()


def get_tape() -> Tape:
    """The calling thread's tape."""
    tape = getattr(_local, "tape", None)
    if tape is None:
        tape = Tape()
        _local.tape = tape
    return tape


def is_grad_enabled() -> bool:
    return get_tape().enabled


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable recording in the calling thread."""
    tape = get_tape()
    previous = tape.enabled
    tape.enabled = False
    try:
        yield
    finally:
        tape.enabled = previous


def set_anomaly_detection(enabled: bool) -> None:
    """Check every op output for NaN/inf (slow, for debugging)."""
    get_tape().check_finite = enabled


def make_result(
    values: np.ndarray,
    parents: Sequence[Tensor],
    backward_fn: BackwardFn,
    op: str,
) -> Tensor:
    """Wrap an op output, recording it when any parent needs a gradient."""
    out = Tensor.__new__(Tensor)
    out.values = values if values.dtype == np.float64 else values.astype(np.float64)
    out.requires_grad = False
    out.grad = None
    out.name = None
    out.op = op
    out._parents = ()
    out._backward = None

    tape = get_tape()
    if tape.check_finite and not np.all(np.isfinite(out.values)):
        raise NonFiniteError(f"{op} produced non-finite values")
    if tape.enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
        tape.record(out)
    return out


def backward(
    loss: Tensor,
    inputs: Optional[Sequence[Tensor]] = None,
    strict: bool = False,
) -> List[Tensor]:
    """Populate ``.grad`` of every leaf reachable from a scalar loss.

    Leaf gradients accumulate across calls. When ``inputs`` is given, any of them
    not reached gets a zero gradient and is returned (and logged) as disconnected;
    with ``strict=True`` that raises DisconnectedGraphError instead.

    Returns:
        The disconnected inputs, empty when every input was reached.
    """
    if loss.size != 1:
        raise NonScalarLossError(f"loss must be scalar, got shape {loss.shape}")
    tape = get_tape()
    if len(tape) == 0 or loss.is_leaf:
        raise EmptyTapeError("nothing recorded on the tape; does the loss depend on any parameter?")

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.values)}
    reached = set()

    for node in reversed(tape.nodes):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        parent_grads = node._backward(g)
        for parent, pg in zip(node._parents, parent_grads):
            if pg is None or not parent.requires_grad:
                continue
            if parent.is_leaf:
                reached.add(id(parent))
                parent.grad = pg.copy() if parent.grad is None else parent.grad + pg
            elif id(parent) in grads:
                grads[id(parent)] = grads[id(parent)] + pg
            else:
                grads[id(parent)] = pg

    tape.clear()

    disconnected = []
    for leaf in inputs or ():
        if id(leaf) not in reached:
            disconnected.append(leaf)
            if leaf.grad is None:
                leaf.grad = np.zeros_like(leaf.values)

    if disconnected:
        names = ", ".join(t.name or repr(t) for t in disconnected)
        if strict:
            raise DisconnectedGraphError(f"leaves not reachable from the loss: {names}")
        logger.warning(f"Disconnected leaves received zero gradient: {names}")

    for leaf in inputs or ():
        if not np.all(np.isfinite(leaf.grad)):
            raise NonFiniteError(f"non-finite gradient for {leaf.name or leaf!r}")

    return disconnected
