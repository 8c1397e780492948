"""Shared tensor machinery for equivariant layers on (batched) subgraph bags.

Node states live in a grid X of shape (B, n, n, d): axis 1 indexes the
subgraph k, axis 2 the node i, so X[b, k, i] is node i's representation in
subgraph k and the bag's root nodes sit on the diagonal.  Adjacency, masks and
membership are constants on the tape; everything flows through the autodiff
primitives so each layer is trainable as written.
"""

from __future__ import annotations

import numpy as np

from .. import autograd as ag
from ..autograd import DiffTensor, Tape
from ..errors import MissingMembership, ShapeMismatch
from ..policy import SubgraphBag


class BagCtx:
    """Tape-bound constants for one (batched) bag."""

    def __init__(self, tape: Tape, sub_adj: np.ndarray, orig_adj: np.ndarray,
                 membership: np.ndarray | None):
        if sub_adj.ndim == 3:
            sub_adj = sub_adj[None]
            orig_adj = orig_adj[None]
            membership = None if membership is None else membership[None]
        b, n = sub_adj.shape[0], sub_adj.shape[1]
        if sub_adj.shape != (b, n, n, n) or orig_adj.shape != (b, n, n):
            raise ShapeMismatch("bag tensors disagree on (B, n)")
        self.tape = tape
        self.batch, self.n = b, n
        asub = sub_adj.astype(np.float64)
        aorig = orig_adj.astype(np.float64)
        rng_n = np.arange(n)
        adiag = asub[:, rng_n, rng_n, :]  # [b, i, h] = sub_adj[b, i, i, h]

        self.asub = tape.constant(asub)
        self.asub_p = tape.constant(asub.transpose(0, 2, 1, 3))  # [b, i, k, h]
        self.adiag = tape.constant(adiag)
        self.adiag_mask = tape.constant(adiag[..., None])  # mask[b, k, j] = sub_adj[b,k,k,j]
        self.adiag_mask_t = tape.constant(adiag.transpose(0, 2, 1)[..., None])  # [b, h, i]
        self.aorig_m = tape.constant(aorig[:, None])  # (B, 1, n, n) for matmul
        self.aorig_mask = tape.constant(aorig[..., None])  # symmetric, any axis pairing
        self.eye_mask = tape.constant(np.eye(n)[None, :, :, None])
        self.offdiag_mask = tape.constant((1.0 - np.eye(n))[None, :, :, None])
        if membership is not None:
            self.member_mask = tape.constant(membership.astype(np.float64)[..., None])
        else:
            self.member_mask = None
        # plain-array copies for mean divisors
        self._asub_np = asub
        self._adiag_np = adiag
        self._aorig_np = aorig

    def require_membership(self) -> DiffTensor:
        if self.member_mask is None:
            raise MissingMembership("bag carries no membership mask")
        return self.member_mask


def make_ctx(tape: Tape, bag: SubgraphBag) -> BagCtx:
    return BagCtx(tape, bag.sub_adj, bag.orig_adj, bag.membership)


def grid_from_bag(tape: Tape, bag: SubgraphBag, parameter: bool = False) -> DiffTensor:
    x = bag.sub_feat[None]
    return tape.parameter("__input__", x) if parameter else tape.constant(x)


def bag_with_features(bag: SubgraphBag, grid: np.ndarray) -> SubgraphBag:
    if grid.ndim == 4:
        if grid.shape[0] != 1:
            raise ShapeMismatch("expected a singleton batch")
        grid = grid[0]
    return SubgraphBag(bag.sub_adj, np.ascontiguousarray(grid), bag.membership,
                       bag.orig_adj, bag.policy)


# ---------------------------------------------------------------------------
# aggregation helpers; all take/return DiffTensors


def diag_vec(x: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """(B, n, d): entry k = x^k_k."""
    return ag.sum_axis(ag.elementwise_multiply(x, ctx.eye_mask), 2)


def diag_embed(v: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """(B, n, d) -> (B, n, n, d) with v on the diagonal, zero elsewhere."""
    return ag.elementwise_multiply(ag.broadcast_axis(v, 2, ctx.n), ctx.eye_mask)


def as_rows(v: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """(B, n, d) -> (B, n, n, d), value v[b, i] at every (k, i)."""
    return ag.broadcast_axis(v, 1, ctx.n)


def as_cols(v: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """(B, n, d) -> (B, n, n, d), value v[b, k] at every (k, i)."""
    return ag.broadcast_axis(v, 2, ctx.n)


def row_sum(x: DiffTensor) -> DiffTensor:
    """(B, n, 1, d): sum_j x^k_j per subgraph k."""
    return ag.sum_axis(x, 2, keepdims=True)


def col_sum(x: DiffTensor) -> DiffTensor:
    """(B, 1, n, d): sum_h x^h_i per node i."""
    return ag.sum_axis(x, 1, keepdims=True)


def sub_msg(x: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """(B, n, n, d): sum_{j ~_k i} x^k_j."""
    return ag.matmul(ctx.asub, x)


def orig_msg(x: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """(B, n, n, d): sum_{j ~ i} x^k_j (original connectivity)."""
    return ag.matmul(ctx.aorig_m, x)


def transpose_grid(x: DiffTensor) -> DiffTensor:
    return ag.transpose(x, (0, 2, 1, 3))


def masked_row_sum(x: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """(B, n, 1, d): per-subgraph readout over member nodes only."""
    return ag.sum_axis(ag.elementwise_multiply(x, ctx.require_membership()), 2, keepdims=True)
