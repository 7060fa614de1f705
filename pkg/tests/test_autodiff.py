"""Test suite for the reverse-mode tensor engine"""

import numpy as np
import pytest

from autodiff import Tensor, backward, finite_difference_check, functional as F, get_tape, no_grad, set_anomaly_detection
from commands.gradcheck import OP_THRESHOLD, check_ops
from errors import (
    DisconnectedGraphError,
    EmptyTapeError,
    NonFiniteError,
    NonScalarLossError,
    ShapeMismatchError,
)


@pytest.fixture(autouse=True)
def clean_tape():
    """Every test starts and ends with an empty tape"""
    get_tape().clear()
    yield
    get_tape().clear()
    set_anomaly_detection(False)


def test_product_rule():
    """Test d(a * b) / da = b"""
    a = Tensor([2.0, 3.0], requires_grad=True)
    b = Tensor([5.0, 7.0], requires_grad=True)
    backward(F.sum(F.mul(a, b)))
    np.testing.assert_array_equal(a.grad, [5.0, 7.0])
    np.testing.assert_array_equal(b.grad, [2.0, 3.0])


def test_broadcast_gradient_is_summed():
    """Test a broadcast bias gets the column sums"""
    x = Tensor(np.ones((3, 4)), requires_grad=True)
    b = Tensor(np.zeros(4), requires_grad=True)
    backward(F.sum(F.add(x, b)))
    np.testing.assert_array_equal(b.grad, np.full(4, 3.0))


def test_gradients_accumulate():
    """Test two backward passes add into .grad"""
    a = Tensor([1.0, 2.0], requires_grad=True)
    backward(F.sum_squares(a))
    backward(F.sum_squares(a))
    np.testing.assert_array_equal(a.grad, [4.0, 8.0])


def test_operator_sugar():
    """Test Tensor operators route to the recorded ops"""
    a = Tensor(np.eye(2), requires_grad=True)
    out = (a @ a) * 2.0 - a
    assert out.op == "sub"
    backward(F.sum(out))
    np.testing.assert_allclose(a.grad, np.full((2, 2), 3.0))


def test_non_scalar_loss():
    """Test backward needs a single-element loss"""
    a = Tensor([1.0, 2.0], requires_grad=True)
    with pytest.raises(NonScalarLossError):
        backward(F.mul(a, a))


def test_empty_tape():
    """Test a loss computed without recording"""
    a = Tensor([1.0], requires_grad=True)
    with no_grad():
        loss = F.sum_squares(a)
    assert len(get_tape()) == 0
    with pytest.raises(EmptyTapeError):
        backward(loss)


def test_disconnected_leaf_gets_zero_gradient():
    """Test an unused input is reported and zero-filled"""
    a = Tensor([1.0], requires_grad=True)
    unused = Tensor([4.0, 5.0], requires_grad=True)
    disconnected = backward(F.sum_squares(a), inputs=[a, unused])
    assert disconnected == [unused]
    np.testing.assert_array_equal(unused.grad, [0.0, 0.0])


def test_disconnected_leaf_strict():
    """Test strict mode raises on an unreachable input"""
    a = Tensor([1.0], requires_grad=True)
    unused = Tensor([4.0], requires_grad=True, name="unused")
    with pytest.raises(DisconnectedGraphError):
        backward(F.sum_squares(a), inputs=[a, unused], strict=True)


def test_backward_clears_tape():
    """Test the tape is empty after backward"""
    a = Tensor([1.0], requires_grad=True)
    loss = F.sum_squares(a)
    assert len(get_tape()) == 1
    backward(loss)
    assert len(get_tape()) == 0


def test_matmul_shape_mismatch():
    """Test incompatible inner dimensions"""
    with pytest.raises(ShapeMismatchError):
        F.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))


def test_anomaly_detection_catches_nan():
    """Test anomaly detection flags a log of a negative value"""
    set_anomaly_detection(True)
    with np.errstate(invalid="ignore"):
        with pytest.raises(NonFiniteError):
            F.log(Tensor([-1.0], requires_grad=True))


def test_softmax_rows_sum_to_one(rng):
    """Test softmax output is a distribution along the axis"""
    s = F.softmax(Tensor(rng.normal(size=(4, 5)) * 50.0), axis=-1)
    np.testing.assert_allclose(s.values.sum(axis=-1), 1.0)
    assert np.all(np.isfinite(s.values))


def test_batchnorm_eval_is_affine(rng):
    """Test doubling the input doubles the output minus its shift in eval mode"""
    gamma = Tensor(rng.normal(size=3))
    beta = Tensor(rng.normal(size=3))
    running_mean = rng.normal(size=3)
    running_var = rng.uniform(0.5, 2.0, size=3)
    stats = (running_mean.copy(), running_var.copy())
    x = rng.normal(size=(5, 3))

    def bn(values):
        return F.batchnorm(Tensor(values), gamma, beta, running_mean, running_var, training=False).values

    shift = bn(np.zeros((5, 3)))
    np.testing.assert_allclose(bn(2.0 * x) - shift, 2.0 * (bn(x) - shift), atol=1e-12)
    np.testing.assert_array_equal(running_mean, stats[0])
    np.testing.assert_array_equal(running_var, stats[1])


def test_single_key_attention_returns_value():
    """Test one key puts all weight on its value"""
    out = F.scaled_dot_product_attention(Tensor([[0.3, -1.2]]), Tensor([[2.0, 0.5]]), Tensor([[3.0]]))
    np.testing.assert_allclose(out.values, [[3.0]])


def test_attention_rows_are_convex_combinations(rng):
    """Test every output row lies within the range of the values"""
    q = Tensor(rng.normal(size=(2, 4, 3)))
    k = Tensor(rng.normal(size=(2, 6, 3)))
    v = Tensor(rng.normal(size=(2, 6, 5)))
    out = F.scaled_dot_product_attention(q, k, v).values
    assert out.shape == (2, 4, 5)
    assert np.all(out <= v.values.max(axis=1, keepdims=True) + 1e-12)
    assert np.all(out >= v.values.min(axis=1, keepdims=True) - 1e-12)

    weights = F.softmax(Tensor(q.values @ k.values.transpose(0, 2, 1) / np.sqrt(3)), axis=-1).values
    np.testing.assert_allclose(weights.sum(axis=-1), 1.0)
    np.testing.assert_allclose(out, weights @ v.values, atol=1e-12)


def test_tape_dump_lists_ops():
    """Test the text graph names every recorded op"""
    w = Tensor(np.ones((2, 2)), requires_grad=True, name="w")
    F.sum(F.relu(F.matmul(Tensor(np.ones((1, 2))), w)))
    dump = get_tape().dump()
    assert "matmul" in dump
    assert "relu" in dump
    assert "w[2, 2]" in dump


def test_three_layer_composition(rng):
    """Test a linear-relu-linear-log_softmax stack against central differences"""
    x = rng.normal(size=(4, 3))
    w1 = Tensor(rng.normal(size=(3, 5)), requires_grad=True)
    b1 = Tensor(rng.normal(size=5), requires_grad=True)
    w2 = Tensor(rng.normal(size=(5, 2)), requires_grad=True)
    target = np.eye(2)[[0, 1, 1, 0]]

    def loss(w1, b1, w2):
        h = F.relu(F.add(F.matmul(Tensor(x), w1), b1))
        return F.sum(F.mul(F.log_softmax(F.matmul(h, w2), axis=-1), -target))

    assert finite_difference_check(loss, [w1, b1, w2]) < 1e-4


def test_gradient_check_single_tensor(rng):
    """Test the single-tensor calling convention"""
    x = Tensor(rng.normal(size=(3, 3)), requires_grad=True)
    assert finite_difference_check(lambda t: F.sum_squares(F.softmax(F.matmul(t, t))), x) < 1e-4


def test_gradient_check_detects_wrong_gradient():
    """Test a deliberately wrong backward is caught"""
    from autodiff.tensor import make_result

    def bad_square(a):
        return make_result(a.values ** 2, (a,), lambda g: (g * a.values,), "bad_square")

    x = Tensor([1.0, 2.0], requires_grad=True)
    assert finite_difference_check(lambda t: F.sum(bad_square(t)), x) > 0.1


@pytest.mark.parametrize("seed", range(20))
def test_every_op_matches_finite_differences(seed):
    """Test each registered op on random inputs"""
    errors = check_ops(seed)
    assert errors
    assert max(errors.values()) < OP_THRESHOLD, errors
