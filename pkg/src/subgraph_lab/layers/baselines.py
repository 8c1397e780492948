"""Prior subgraph-GNN layer families on the bag grid, all with the
sigma(W1 x + W2 sum_neighbors x) message-passing base encoder.

Public entry points take a SubgraphBag and numpy weights and return a new bag;
the *_core functions operate on tape tensors and are reused by the training
loop and the gradient checker.
"""

from __future__ import annotations

import numpy as np

from .. import autograd as ag
from ..autograd import DiffTensor, Tape
from ..policy import SubgraphBag
from . import core
from .core import BagCtx


def _act(x: DiffTensor, activation: str) -> DiffTensor:
    if activation == "relu":
        return ag.relu(x)
    if activation == "identity":
        return x
    raise ValueError(f"unknown activation {activation!r}")


def _lin(x: DiffTensor, w: DiffTensor) -> DiffTensor:
    return ag.matmul(x, ag.transpose(w, (1, 0)))


def _wrap_weights(tape: Tape, weights: dict) -> dict:
    return {k: tape.constant(np.asarray(v, dtype=np.float64)) for k, v in weights.items()}


def _run_single(bag: SubgraphBag, forward) -> SubgraphBag:
    tape = Tape()
    ctx = core.make_ctx(tape, bag)
    x = core.grid_from_bag(tape, bag)
    out = forward(tape, ctx, x)
    return core.bag_with_features(bag, out.values)


# ---------------------------------------------------------------------------
# Morris base encoder on a plain graph


def morris_layer(w1, w2, adjacency: np.ndarray, features: np.ndarray,
                 activation: str = "relu") -> np.ndarray:
    """x'_i = sigma(W1 x_i + W2 sum_{j ~ i} x_j) on a single graph."""
    tape = Tape()
    x = tape.constant(features[None])
    a = tape.constant(adjacency.astype(np.float64)[None])
    out = morris_core(tape.constant(np.asarray(w1, dtype=np.float64)),
                      tape.constant(np.asarray(w2, dtype=np.float64)), a, x, activation)
    return out.values[0]


def morris_core(w1: DiffTensor, w2: DiffTensor, adjacency: DiffTensor, x: DiffTensor,
                activation: str = "relu") -> DiffTensor:
    return _act(ag.add(_lin(x, w1), _lin(ag.matmul(adjacency, x), w2)), activation)


# ---------------------------------------------------------------------------
# DS / NGNN-inner


def ds_core(ctx: BagCtx, x: DiffTensor, w1: DiffTensor, w2: DiffTensor,
            activation: str = "relu") -> DiffTensor:
    return _act(ag.add(_lin(x, w1), _lin(core.sub_msg(x, ctx), w2)), activation)


def ds_layer(bag: SubgraphBag, w1, w2, activation: str = "relu") -> SubgraphBag:
    def forward(tape, ctx, x):
        ws = _wrap_weights(tape, {"w1": w1, "w2": w2})
        return ds_core(ctx, x, ws["w1"], ws["w2"], activation)

    return _run_single(bag, forward)


ngnn_inner_layer = ds_layer
ngnn_inner_core = ds_core


# ---------------------------------------------------------------------------
# DSS (original-connectivity variant)


def dss_core(ctx: BagCtx, x: DiffTensor, w1_sub: DiffTensor, w2_sub: DiffTensor,
             w1_cross: DiffTensor, w2_cross: DiffTensor, activation: str = "relu") -> DiffTensor:
    cross = core.col_sum(x)  # sum_h x^h_i
    out = ag.add(_lin(x, w1_sub), _lin(core.sub_msg(x, ctx), w2_sub))
    out = ag.add(out, _lin(cross, w1_cross))
    out = ag.add(out, _lin(core.orig_msg(cross, ctx), w2_cross))
    return _act(out, activation)


def dss_layer(bag: SubgraphBag, w1_sub, w2_sub, w1_cross, w2_cross,
              activation: str = "relu") -> SubgraphBag:
    def forward(tape, ctx, x):
        ws = _wrap_weights(tape, {"a": w1_sub, "b": w2_sub, "c": w1_cross, "d": w2_cross})
        return dss_core(ctx, x, ws["a"], ws["b"], ws["c"], ws["d"], activation)

    return _run_single(bag, forward)


# ---------------------------------------------------------------------------
# GNN-AK and GNN-AK-ctx: L inner message-passing layers, then the aggregation
# block.  Sums in the aggregation block are global by default; `masked=True`
# restricts the readout and context sums to ego-net members.


def gnnak_core(ctx: BagCtx, x: DiffTensor, inner_weights: list, ctx_variant: bool,
               masked: bool = False, activation: str = "relu") -> DiffTensor:
    for w1, w2 in inner_weights:
        x = ds_core(ctx, x, w1, w2, activation)
    dv = core.diag_vec(x, ctx)  # x^i_i
    roots = core.as_rows(dv, ctx)
    if masked:
        member = ctx.require_membership()
        readout = core.as_rows(ag.sum_axis(ag.elementwise_multiply(x, member), 2), ctx)
        context = core.as_rows(
            ag.sum_axis(ag.elementwise_multiply(ag.transpose(x, (0, 2, 1, 3)), member), 2), ctx)
    else:
        readout = core.as_rows(ag.sum_axis(x, 2), ctx)  # sum_j x^i_j, per subgraph i
        context = core.as_rows(ag.sum_axis(x, 1), ctx)  # sum_h x^h_i, per node i
    out = ag.add(roots, readout)
    if ctx_variant:
        out = ag.add(out, context)
    return out  # no activation after the aggregation block


def gnnak_block(bag: SubgraphBag, inner_weights: list, ctx_variant: bool = False,
                masked: bool = False, activation: str = "relu") -> SubgraphBag:
    def forward(tape, ctx, x):
        ws = [(tape.constant(np.asarray(w1, dtype=np.float64)),
               tape.constant(np.asarray(w2, dtype=np.float64))) for w1, w2 in inner_weights]
        return gnnak_core(ctx, x, ws, ctx_variant, masked, activation)

    return _run_single(bag, forward)


def gnnak_ctx_block(bag: SubgraphBag, inner_weights: list, masked: bool = False,
                    activation: str = "relu") -> SubgraphBag:
    return gnnak_block(bag, inner_weights, ctx_variant=True, masked=masked, activation=activation)


# ---------------------------------------------------------------------------
# ID-GNN: messages from the subgraph root use W3, all other neighbours W2.


def idgnn_core(ctx: BagCtx, x: DiffTensor, w1: DiffTensor, w2: DiffTensor, w3: DiffTensor,
               activation: str = "relu") -> DiffTensor:
    dv = core.diag_vec(x, ctx)
    nonroot = ag.elementwise_multiply(x, ctx.offdiag_mask)
    root_grid = core.diag_embed(dv, ctx)
    msg = ag.add(_lin(ag.matmul(ctx.asub, nonroot), w2), _lin(ag.matmul(ctx.asub, root_grid), w3))
    return _act(ag.add(_lin(x, w1), msg), activation)


def idgnn_layer(bag: SubgraphBag, w1, w2, w3, activation: str = "relu") -> SubgraphBag:
    def forward(tape, ctx, x):
        ws = _wrap_weights(tape, {"w1": w1, "w2": w2, "w3": w3})
        return idgnn_core(ctx, x, ws["w1"], ws["w2"], ws["w3"], activation)

    return _run_single(bag, forward)
