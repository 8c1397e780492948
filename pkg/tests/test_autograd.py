import numpy as np
import pytest

from subgraph_lab import autograd as ag
from subgraph_lab.autograd import (
    Tape,
    adam_init,
    adam_step,
    backward,
    grad_check,
    load_checkpoint,
    save_checkpoint,
    sgd_step,
)
from subgraph_lab.errors import NotScalar, ShapeMismatch


def test_relu_forward():
    t = Tape()
    out = ag.relu(t.constant([-1.0, 2.0]))
    assert out.values.tolist() == [0.0, 2.0]


def test_matmul_identity():
    t = Tape()
    x = np.arange(6, dtype=np.float64).reshape(2, 3)
    out = ag.matmul(t.constant(np.eye(2)), t.constant(x))
    assert np.array_equal(out.values, x)


def test_sum_axis_ones():
    t = Tape()
    out = ag.sum_axis(t.constant(np.ones((3, 4))), 1)
    assert out.values.tolist() == [4.0, 4.0, 4.0]


def test_linear_loss_gradient():
    t = Tape()
    w = t.parameter("w", np.zeros((2, 3)))
    x = t.constant(np.array([1.0, 2.0, 3.0]))
    loss = ag.sum_axis(ag.matmul(w, x), 0)
    grads = backward(t, loss)
    assert np.array_equal(grads["w"], np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]))


def test_relu_gradient_positive_preactivations():
    t = Tape()
    w = t.parameter("w", np.array([[2.0, 1.0], [1.0, 2.0]]))
    x = t.constant(np.array([1.0, 1.0]))
    loss = ag.sum_axis(ag.relu(ag.matmul(w, x)), 0)
    grads = backward(t, loss)
    assert np.array_equal(grads["w"], np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_backward_requires_scalar():
    t = Tape()
    w = t.parameter("w", np.ones(3))
    with pytest.raises(NotScalar):
        backward(t, ag.relu(w))


def test_matmul_shape_mismatch():
    t = Tape()
    with pytest.raises(ShapeMismatch):
        ag.matmul(t.constant(np.ones((2, 3))), t.constant(np.ones((2, 3))))


def test_two_layer_mlp_gradcheck(rng):
    x = rng.normals((4,))
    params = {"w1": rng.normals((5, 4)), "b1": rng.normals((5,)),
              "w2": rng.normals((1, 5))}

    def f(tape, t):
        h = ag.relu(ag.add(ag.matmul(t["w1"], tape.constant(x)), t["b1"]))
        return ag.sum_axis(ag.matmul(t["w2"], h), 0)

    with ag.watch_relu_margins() as margins:
        tape = Tape()
        f(tape, tape.parameters(params))
    assert min(margins) > 1e-3  # seed chosen away from the kink
    report = grad_check(f, params, step=1e-6, tol=1e-6)
    assert report["passed"], report


def test_gradcheck_zero_function():
    def f(tape, t):
        return ag.sum_axis(ag.elementwise_multiply(t["w"], tape.constant(np.zeros(3))), 0)

    report = grad_check(f, {"w": np.ones(3)})
    assert report["max_rel_err"] == 0.0


def test_gradcheck_quadratic():
    theta = np.array([1.0, -2.0, 3.0])

    def f(tape, t):
        return ag.sum_axis(ag.elementwise_multiply(t["theta"], t["theta"]), 0)

    tape = Tape()
    tensors = tape.parameters({"theta": theta})
    grads = backward(tape, f(tape, tensors))
    assert np.allclose(grads["theta"], 2 * theta)
    report = grad_check(f, {"theta": theta}, step=1e-6, tol=1e-9)
    assert report["max_rel_err"] < 1e-9


def test_primitive_gradients_numerically(rng):
    x0 = rng.normals((2, 3, 4))

    def f(tape, t):
        a = ag.transpose(t["x"], (1, 0, 2))
        b = ag.broadcast_axis(ag.mean_axis(a, 2), 0, 2)
        c = ag.concat_channels([a, a], axis=-1)
        d = ag.slice_channels(c, 1, 5, axis=-1)
        s = ag.add(ag.sum_axis(ag.sum_axis(ag.sum_axis(d, 2), 1), 0),
                   ag.sum_axis(ag.sum_axis(ag.sum_axis(ag.subtract(b, 1.5), 2), 1), 0))
        return s

    report = grad_check(f, {"x": x0}, step=1e-6, tol=1e-7)
    assert report["passed"], report


def test_tape_determinism(rng):
    x = rng.normals((6, 6))
    w = rng.normals((6, 6))

    def run():
        t = Tape()
        out = ag.relu(ag.matmul(t.constant(x), t.constant(w)))
        return ag.sum_axis(ag.sum_axis(out, 1), 0).values

    assert np.array_equal(run(), run())


def test_sgd_step():
    assert sgd_step(np.array(1.0), np.array(2.0), 0.1) == pytest.approx(0.8)
    with pytest.raises(ShapeMismatch):
        sgd_step(np.ones(2), np.ones(3), 0.1)


def test_adam_first_step_closed_form():
    params = {"w": np.zeros(4)}
    grads = {"w": np.ones(4)}
    state = adam_init(params)
    state, new = adam_step(state, params, grads, lr=0.1)
    assert state["t"] == 1
    assert np.allclose(new["w"], -0.1 * (1.0 / (1.0 + 1e-8)), atol=1e-12)


def test_adam_zero_gradient_keeps_params():
    params = {"w": np.array([3.0, -1.0])}
    state = adam_init(params)
    state, new = adam_step(state, params, {"w": np.zeros(2)}, lr=0.1)
    assert np.array_equal(new["w"], params["w"])


def test_checkpoint_round_trip(tmp_path, rng):
    params = {"a": rng.normals((2, 3)), "b": rng.normals((4,))}
    path = tmp_path / "ckpt.json"
    save_checkpoint(path, params)
    restored = load_checkpoint(path)
    assert set(restored) == {"a", "b"}
    for k in params:
        assert np.array_equal(restored[k], params[k])
