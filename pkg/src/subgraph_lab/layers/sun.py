"""SUN layers: separate parameter sets for root and non-root updates.

Linear mode: five U matrices drive the root update and seven the non-root one.
Expressive mode replaces each linear map with a two-layer MLP and routes the
message-passing pairs through a GIN-style convolution (eps fixed at 0); by
default the cross-bag feature terms use the mean aggregator there, everything
else sums.
"""

from __future__ import annotations

import numpy as np

from .. import autograd as ag
from ..autograd import DiffTensor, Tape
from ..errors import ShapeMismatch, Unsupported
from ..policy import SubgraphBag
from . import core
from .core import BagCtx

LINEAR_WEIGHTS = ("u0", "u1", "u2", "u3", "u4", "u5", "u6", "u2_r", "u3_r", "u4_r", "u5_r", "u6_r")

DEFAULT_AGGREGATORS = {"linear": {"readout": "sum", "vertical": "sum"},
                       "expressive": {"readout": "sum", "vertical": "mean"}}


def _lin(x: DiffTensor, w: DiffTensor) -> DiffTensor:
    return ag.matmul(x, ag.transpose(w, (1, 0)))


def _mlp2(x: DiffTensor, params: dict, prefix: str) -> DiffTensor:
    h = ag.relu(ag.add(_lin(x, params[f"{prefix}.w1"]), params[f"{prefix}.b1"]))
    return ag.add(_lin(h, params[f"{prefix}.w2"]), params[f"{prefix}.b2"])


def _gin(a: DiffTensor, msg: DiffTensor, params: dict, prefix: str) -> DiffTensor:
    # (1 + eps) a + msg with eps = 0, then the internal MLP
    return _mlp2(ag.add(a, msg), params, prefix)


def _sun_inputs(x: DiffTensor, ctx: BagCtx, aggregators: dict):
    """The shared aggregation terms of the SUN update equations."""
    tape = x.tape
    n = ctx.n
    dv = core.diag_vec(x, ctx)  # x^i_i as (B, n, d)
    readout_full = core.row_sum(x)  # (B, n, 1, d): sum_j x^k_j
    readout_diag = ag.sum_axis(x, 2)  # (B, n, d): sum_j x^i_j
    sub_msg = core.sub_msg(x, ctx)  # (B, n, n, d)
    sub_msg_diag = ag.sum_axis(ag.elementwise_multiply(x, ctx.adiag_mask), 2)
    vertical = core.col_sum(x)  # (B, 1, n, d): sum_h x^h_i
    if aggregators.get("vertical", "sum") == "mean":
        vertical = ag.elementwise_multiply(vertical, tape.constant(np.array(1.0 / n)))
    if aggregators.get("readout", "sum") == "mean":
        readout_full = ag.elementwise_multiply(readout_full, tape.constant(np.array(1.0 / n)))
        readout_diag = ag.elementwise_multiply(readout_diag, tape.constant(np.array(1.0 / n)))
    vertical_msg = ag.matmul(ctx.aorig_m, vertical)  # (B, 1, n, d): sum_{j~i} sum_h x^h_j
    vertical_diag = ag.sum_axis(vertical, 1)  # (B, n, d)
    vertical_msg_diag = ag.sum_axis(vertical_msg, 1)
    return {
        "dv": dv,
        "readout_full": readout_full, "readout_diag": readout_diag,
        "sub_msg": sub_msg, "sub_msg_diag": sub_msg_diag,
        "vertical": vertical, "vertical_diag": vertical_diag,
        "vertical_msg": vertical_msg, "vertical_msg_diag": vertical_msg_diag,
    }


def sun_linear_core(params: dict, x: DiffTensor, ctx: BagCtx,
                    activation: str = "relu", aggregators: dict | None = None) -> DiffTensor:
    aggregators = aggregators or DEFAULT_AGGREGATORS["linear"]
    terms = _sun_inputs(x, ctx, aggregators)

    root = _lin(terms["dv"], params["u2_r"])
    root = ag.add(root, _lin(terms["readout_diag"], params["u3_r"]))
    root = ag.add(root, _lin(terms["sub_msg_diag"], params["u4_r"]))
    root = ag.add(root, _lin(terms["vertical_diag"], params["u5_r"]))
    root = ag.add(root, _lin(terms["vertical_msg_diag"], params["u6_r"]))
    if "bias_r" in params:
        root = ag.add(root, params["bias_r"])

    off = _lin(core.as_rows(terms["dv"], ctx), params["u0"])
    off = ag.add(off, _lin(core.as_cols(terms["dv"], ctx), params["u1"]))
    off = ag.add(off, _lin(x, params["u2"]))
    off = ag.add(off, _lin(terms["readout_full"], params["u3"]))
    off = ag.add(off, _lin(terms["sub_msg"], params["u4"]))
    off = ag.add(off, _lin(terms["vertical"], params["u5"]))
    off = ag.add(off, _lin(terms["vertical_msg"], params["u6"]))
    if "bias" in params:
        off = ag.add(off, params["bias"])

    out = ag.add(ag.elementwise_multiply(off, ctx.offdiag_mask), core.diag_embed(root, ctx))
    if activation == "relu":
        out = ag.relu(out)
    return out


def sun_expressive_core(params: dict, x: DiffTensor, ctx: BagCtx,
                        activation: str = "relu", aggregators: dict | None = None) -> DiffTensor:
    aggregators = aggregators or DEFAULT_AGGREGATORS["expressive"]
    terms = _sun_inputs(x, ctx, aggregators)

    root = _mlp2(terms["dv"], params, "mu2_r")
    root = ag.add(root, _mlp2(terms["readout_diag"], params, "mu3_r"))
    root = ag.add(root, _gin(terms["dv"], terms["sub_msg_diag"], params, "gin0_r"))
    root = ag.add(root, _gin(terms["vertical_diag"], terms["vertical_msg_diag"], params, "gin1_r"))

    off = _mlp2(core.as_rows(terms["dv"], ctx), params, "mu0")
    off = ag.add(off, _mlp2(core.as_cols(terms["dv"], ctx), params, "mu1"))
    off = ag.add(off, _mlp2(x, params, "mu2"))
    off = ag.add(off, _mlp2(terms["readout_full"], params, "mu3"))
    off = ag.add(off, _gin(x, terms["sub_msg"], params, "gin0"))
    off = ag.add(off, _gin(terms["vertical"], terms["vertical_msg"], params, "gin1"))

    out = ag.add(ag.elementwise_multiply(off, ctx.offdiag_mask), core.diag_embed(root, ctx))
    if activation == "relu":
        out = ag.relu(out)
    return out


def sun_core(params: dict, x: DiffTensor, ctx: BagCtx, mode: str,
             activation: str = "relu", aggregators: dict | None = None) -> DiffTensor:
    if mode == "linear":
        return sun_linear_core(params, x, ctx, activation, aggregators)
    if mode == "expressive":
        return sun_expressive_core(params, x, ctx, activation, aggregators)
    raise Unsupported(f"unknown SUN mode {mode!r}")


def sun_layer(theta1: dict, theta2: dict, bag: SubgraphBag, mode: str = "linear",
              activation: str = "relu", aggregators: dict | None = None) -> SubgraphBag:
    """Apply one SUN layer to a bag.

    ``theta1`` holds the root-update parameters (linear: u2_r..u6_r and an
    optional bias_r; expressive: mu2_r/mu3_r/gin0_r/gin1_r MLPs), ``theta2``
    the non-root ones (u0..u6 / mu0..mu3, gin0, gin1).
    """
    params = {}
    params.update(theta2)
    params.update(theta1)
    if mode == "linear":
        missing = [k for k in LINEAR_WEIGHTS if k not in params]
        if missing:
            raise ShapeMismatch(f"linear SUN is missing weights {missing}")
    tape = Tape()
    ctx = core.make_ctx(tape, bag)
    x = core.grid_from_bag(tape, bag)
    tensors = {k: tape.constant(np.asarray(v, dtype=np.float64)) for k, v in params.items()}
    out = sun_core(tensors, x, ctx, mode, activation, aggregators)
    return core.bag_with_features(bag, out.values)


def split_theta(params: dict) -> tuple[dict, dict]:
    """Partition a flat SUN parameter dict into (theta1 root, theta2 non-root)."""
    theta1 = {k: v for k, v in params.items() if k.endswith("_r") or k.startswith(("mu2_r", "mu3_r", "gin0_r", "gin1_r")) or k == "bias_r"}
    theta2 = {k: v for k, v in params.items() if k not in theta1}
    return theta1, theta2
