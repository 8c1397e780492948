"""Minimal reverse-mode autodiff over dense float64 arrays.

A Tape records primitive applications in topological order; backward() walks it
once in reverse and returns gradients for every leaf registered as a parameter.
Forward values are plain numpy; nothing is mutated in place after recording.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NotScalar, ShapeMismatch


@dataclass(frozen=True, eq=False)
class DiffTensor:
    tape: "Tape"
    node_id: int
    values: np.ndarray

    @property
    def shape(self):
        return self.values.shape


class _Node:
    __slots__ = ("op", "inputs", "backward", "param_name")

    def __init__(self, op, inputs, backward, param_name=None):
        self.op = op
        self.inputs = inputs  # node ids
        self.backward = backward  # grad_out -> list of grads aligned with inputs
        self.param_name = param_name


class Tape:
    def __init__(self):
        self._nodes: list[_Node] = []

    def _record(self, op, inputs, values, backward, param_name=None) -> DiffTensor:
        node_id = len(self._nodes)
        self._nodes.append(_Node(op, [t.node_id for t in inputs], backward, param_name))
        # recorded values are never mutated afterwards (convention, not enforced,
        # to avoid copying large constant masks)
        return DiffTensor(self, node_id, np.asarray(values, dtype=np.float64))

    def constant(self, values) -> DiffTensor:
        return self._record("const", [], values, None)

    def parameter(self, name: str, values) -> DiffTensor:
        return self._record("param", [], values, None, param_name=name)

    def parameters(self, values_by_name: dict) -> dict:
        return {name: self.parameter(name, vals) for name, vals in values_by_name.items()}


def _wrap(tape: Tape, x) -> DiffTensor:
    if isinstance(x, DiffTensor):
        if x.tape is not tape:
            raise ShapeMismatch("operands live on different tapes")
        return x
    return tape.constant(np.asarray(x, dtype=np.float64))


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum grad down to `shape` (the inverse of numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for ax, size in enumerate(shape):
        if size == 1 and grad.shape[ax] != 1:
            grad = grad.sum(axis=ax, keepdims=True)
    return grad.reshape(shape)


def add(a: DiffTensor, b) -> DiffTensor:
    b = _wrap(a.tape, b)
    out = a.values + b.values

    def backward(g):
        return [_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)]

    return a.tape._record("add", [a, b], out, backward)


def subtract(a: DiffTensor, b) -> DiffTensor:
    b = _wrap(a.tape, b)
    out = a.values - b.values

    def backward(g):
        return [_unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)]

    return a.tape._record("subtract", [a, b], out, backward)


def elementwise_multiply(a: DiffTensor, b) -> DiffTensor:
    b = _wrap(a.tape, b)
    out = a.values * b.values

    def backward(g):
        return [
            _unbroadcast(g * b.values, a.shape),
            _unbroadcast(g * a.values, b.shape),
        ]

    return a.tape._record("elementwise_multiply", [a, b], out, backward)


def matmul(a: DiffTensor, b) -> DiffTensor:
    b = _wrap(a.tape, b)
    try:
        out = a.values @ b.values
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from exc

    def backward(g):
        av, bv = a.values, b.values
        a2 = av[None, :] if av.ndim == 1 else av
        b2 = bv[:, None] if bv.ndim == 1 else bv
        g2 = g
        if av.ndim == 1:
            g2 = np.expand_dims(g2, -2)
        if bv.ndim == 1:
            g2 = np.expand_dims(g2, -1)
        ga = g2 @ np.swapaxes(b2, -1, -2)
        gb = np.swapaxes(a2, -1, -2) @ g2
        if av.ndim == 1:
            ga = ga[..., 0, :]
        if bv.ndim == 1:
            gb = gb[..., 0]
        return [_unbroadcast(ga, av.shape), _unbroadcast(gb, bv.shape)]

    return a.tape._record("matmul", [a, b], out, backward)


_relu_watch: list | None = None


class watch_relu_margins:
    """Context manager collecting min |preactivation| of every relu evaluated
    inside it; used to resample inputs away from the kink before grad checks."""

    def __enter__(self):
        global _relu_watch
        self._prev = _relu_watch
        _relu_watch = []
        return _relu_watch

    def __exit__(self, *exc):
        global _relu_watch
        _relu_watch = self._prev
        return False


def relu(a: DiffTensor) -> DiffTensor:
    out = np.maximum(a.values, 0.0)
    mask = (a.values > 0.0).astype(np.float64)  # subgradient at 0 is 0
    if _relu_watch is not None and a.values.size:
        _relu_watch.append(float(np.min(np.abs(a.values))))

    def backward(g):
        return [g * mask]

    return a.tape._record("relu", [a], out, backward)


def sum_axis(a: DiffTensor, axis: int, keepdims: bool = False) -> DiffTensor:
    out = a.values.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if not keepdims:
            g = np.expand_dims(g, axis=axis)
        return [np.broadcast_to(g, a.shape).copy()]

    return a.tape._record("sum_axis", [a], out, backward)


def mean_axis(a: DiffTensor, axis: int, keepdims: bool = False) -> DiffTensor:
    size = a.shape[axis]
    out = a.values.mean(axis=axis, keepdims=keepdims)

    def backward(g):
        if not keepdims:
            g = np.expand_dims(g, axis=axis)
        return [np.broadcast_to(g, a.shape).copy() / size]

    return a.tape._record("mean_axis", [a], out, backward)


def broadcast_axis(a: DiffTensor, axis: int, size: int) -> DiffTensor:
    """Insert a new axis of the given extent at `axis` (values repeated along it)."""
    expanded = np.expand_dims(a.values, axis=axis)
    shape = list(expanded.shape)
    shape[axis] = size
    out = np.broadcast_to(expanded, shape).copy()

    def backward(g):
        return [g.sum(axis=axis)]

    return a.tape._record("broadcast_axis", [a], out, backward)


def transpose(a: DiffTensor, axes) -> DiffTensor:
    axes = tuple(axes)
    out = np.transpose(a.values, axes)
    inv = np.argsort(axes)

    def backward(g):
        return [np.transpose(g, inv)]

    return a.tape._record("transpose", [a], out, backward)


def concat_channels(tensors: list, axis: int = -1) -> DiffTensor:
    tape = tensors[0].tape
    tensors = [_wrap(tape, t) for t in tensors]
    out = np.concatenate([t.values for t in tensors], axis=axis)
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        g = np.moveaxis(g, axis, -1)
        grads = []
        for i in range(len(sizes)):
            grads.append(np.moveaxis(g[..., offsets[i]: offsets[i + 1]], -1, axis))
        return grads

    return tape._record("concat_channels", tensors, out, backward)


def slice_channels(a: DiffTensor, start: int, stop: int, axis: int = -1) -> DiffTensor:
    index = [slice(None)] * a.values.ndim
    index[axis] = slice(start, stop)
    index = tuple(index)
    out = a.values[index]

    def backward(g):
        full = np.zeros(a.shape)
        full[index] = g
        return [full]

    return a.tape._record("slice_channels", [a], out, backward)


def backward(tape: Tape, loss: DiffTensor) -> dict:
    """Gradients of a scalar loss w.r.t. every parameter leaf on the tape."""
    if loss.values.size != 1:
        raise NotScalar(f"loss has shape {loss.values.shape}")
    grads: dict[int, np.ndarray] = {loss.node_id: np.ones_like(loss.values)}
    for node_id in range(loss.node_id, -1, -1):
        g = grads.pop(node_id, None)
        if g is None:
            continue
        node = tape._nodes[node_id]
        if node.backward is None:
            if node.param_name is not None:
                grads[f"param:{node.param_name}"] = grads.get(f"param:{node.param_name}", 0) + g
            continue
        for input_id, gin in zip(node.inputs, node.backward(g)):
            if input_id in grads:
                grads[input_id] = grads[input_id] + gin
            else:
                grads[input_id] = gin
    out = {}
    for key, val in grads.items():
        if isinstance(key, str) and key.startswith("param:"):
            out[key[len("param:"):]] = np.asarray(val)
    return out


# ---------------------------------------------------------------------------
# gradient checking and optimizers


def grad_check(f, params: dict, step: float = 1e-6, tol: float = 1e-5) -> dict:
    """Compare analytic gradients of f against central finite differences.

    ``f(tape, tensors)`` must return a scalar DiffTensor, where ``tensors`` is a
    name -> DiffTensor dict built from ``params``.  Relative error uses the
    max(|a|, |b|, 1e-8) denominator.
    """
    tape = Tape()
    tensors = tape.parameters(params)
    loss = f(tape, tensors)
    analytic = backward(tape, loss)

    def eval_at(values_by_name):
        t = Tape()
        return float(f(t, t.parameters(values_by_name)).values)

    max_rel = 0.0
    per_param = {}
    for name, vals in params.items():
        vals = np.asarray(vals, dtype=np.float64)
        num = np.zeros_like(vals)
        flat = vals.reshape(-1)
        for idx in range(flat.size):
            bumped = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
            bumped[name].reshape(-1)[idx] = flat[idx] + step
            up = eval_at(bumped)
            bumped[name].reshape(-1)[idx] = flat[idx] - step
            down = eval_at(bumped)
            num.reshape(-1)[idx] = (up - down) / (2.0 * step)
        ana = analytic.get(name, np.zeros_like(vals))
        denom = np.maximum(np.maximum(np.abs(ana), np.abs(num)), 1e-8)
        rel = float(np.max(np.abs(ana - num) / denom)) if vals.size else 0.0
        per_param[name] = rel
        max_rel = max(max_rel, rel)
    return {"max_rel_err": max_rel, "per_param": per_param, "passed": max_rel <= tol}


def sgd_step(theta: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if theta.shape != grad.shape:
        raise ShapeMismatch(f"{theta.shape} vs {grad.shape}")
    return theta - lr * grad


def adam_init(params: dict) -> dict:
    return {
        "m": {k: np.zeros_like(np.asarray(v, dtype=np.float64)) for k, v in params.items()},
        "v": {k: np.zeros_like(np.asarray(v, dtype=np.float64)) for k, v in params.items()},
        "t": 0,
    }


def adam_step(state: dict, params: dict, grads: dict, lr: float,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
    """One Adam update over a parameter dict; returns (state', params')."""
    t = state["t"] + 1
    new_m, new_v, new_params = {}, {}, {}
    for name, theta in params.items():
        g = np.asarray(grads.get(name, np.zeros_like(theta)), dtype=np.float64)
        if g.shape != np.asarray(theta).shape:
            raise ShapeMismatch(f"grad shape {g.shape} != param shape {np.asarray(theta).shape}")
        m = beta1 * state["m"][name] + (1.0 - beta1) * g
        v = beta2 * state["v"][name] + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1 ** t)
        v_hat = v / (1.0 - beta2 ** t)
        new_params[name] = theta - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return {"m": new_m, "v": new_v, "t": t}, new_params


# ---------------------------------------------------------------------------
# checkpoints: flat JSON map name -> {shape, values (row-major)}


def save_checkpoint(path, params: dict) -> None:
    doc = {
        name: {"shape": list(np.asarray(v).shape), "values": np.asarray(v).reshape(-1).tolist()}
        for name, v in params.items()
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    return {
        name: np.array(entry["values"], dtype=np.float64).reshape(entry["shape"])
        for name, entry in doc.items()
    }
