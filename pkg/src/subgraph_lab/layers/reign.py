"""The extended 2-IGN layer space on subgraph bags.

Update targets are the diagonal (root) and off-diagonal (non-root) entries of
the n x n node grid.  Aggregated terms come in three variants: global, local
over the subgraph connectivity (subgraph k for target (k, i), subgraph i for
target (i, i)) and local over the original connectivity.  The plain 2-IGN
layer is the restriction to global variants: 5 on-diagonal and 10 off-diagonal
terms, bell(4) = 15 in total.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import autograd as ag
from ..autograd import DiffTensor, Tape
from ..errors import BadTerm, NotAllowedInIGN2
from ..policy import SubgraphBag
from . import core
from .core import BagCtx

ON_AGGREGATED = ("1.on", "2.on", "3.on", "4.on")
OFF_AGGREGATED = ("1.off", "2.off", "3.off", "4.off", "5.off", "6.off")
ON_PLAIN = ("self",)
OFF_PLAIN = ("self", "transpose", "root_of_subgraph", "node_as_root")
VARIANTS = ("global", "local_subgraph", "local_original")


@dataclass(frozen=True)
class ReignTerm:
    term: str
    weight: str  # parameter name
    variant: str | None = None  # aggregated terms only
    agg: str = "sum"  # sum | mean

    def __post_init__(self):
        aggregated = self.term in ON_AGGREGATED + OFF_AGGREGATED
        if aggregated and self.variant not in VARIANTS:
            raise BadTerm(f"aggregated term {self.term} needs a variant")
        if not aggregated:
            if self.term not in set(ON_PLAIN) | set(OFF_PLAIN):
                raise BadTerm(f"unknown term {self.term!r}")
            if self.variant is not None:
                raise BadTerm(f"plain term {self.term} takes no variant")
        if self.agg not in ("sum", "mean"):
            raise BadTerm(f"aggregation {self.agg!r} is not sum/mean")

    def to_json(self) -> dict:
        return {"term": self.term, "weight": self.weight, "variant": self.variant, "agg": self.agg}

    @staticmethod
    def from_json(doc: dict) -> "ReignTerm":
        return ReignTerm(doc["term"], doc["weight"], doc.get("variant"), doc.get("agg", "sum"))


@dataclass(frozen=True)
class LayerSpec:
    kind: str  # MORRIS | DS | DSS | GNNAK | GNNAK_CTX | IDGNN | NGNN_INNER | IGN2 | REIGN2 | SUN_LINEAR | SUN_EXPRESSIVE
    on_terms: tuple = ()
    off_terms: tuple = ()
    weight_shapes: dict = field(default_factory=dict)
    activation: str = "relu"
    bias_on: str | None = None  # parameter names for biases, optional
    bias_off: str | None = None
    extra: dict = field(default_factory=dict)  # kind-specific knobs (inner depth L, masked, mode...)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "on_terms": [t.to_json() for t in self.on_terms],
            "off_terms": [t.to_json() for t in self.off_terms],
            "weight_shapes": {k: list(v) for k, v in self.weight_shapes.items()},
            "activation": self.activation,
            "bias_on": self.bias_on,
            "bias_off": self.bias_off,
            "extra": self.extra,
        }

    @staticmethod
    def from_json(doc: dict) -> "LayerSpec":
        return LayerSpec(
            kind=doc["kind"],
            on_terms=tuple(ReignTerm.from_json(t) for t in doc.get("on_terms", [])),
            off_terms=tuple(ReignTerm.from_json(t) for t in doc.get("off_terms", [])),
            weight_shapes={k: tuple(v) for k, v in doc.get("weight_shapes", {}).items()},
            activation=doc.get("activation", "relu"),
            bias_on=doc.get("bias_on"),
            bias_off=doc.get("bias_off"),
            extra=doc.get("extra", {}),
        )


@dataclass(frozen=True)
class PoolingSpec:
    kind: str  # SUBGRAPH_READOUT_DEEPSETS | ROOT_POOL | NGNN_OUTER
    member_masked: bool = False
    phi_hidden: int = 0  # per-subgraph MLP width for the deep-sets readout (0 = identity)
    outer_layers: int = 0  # NGNN outer message-passing depth


# ---------------------------------------------------------------------------
# term evaluation


def _count_recip(counts: np.ndarray) -> np.ndarray:
    return 1.0 / np.maximum(counts, 1.0)


def _mean_scale_on(term: str, variant: str, ctx: BagCtx) -> np.ndarray:
    """(B, n, 1) reciprocal summand counts for an on-diagonal aggregated term."""
    n, b = ctx.n, ctx.batch
    adiag = ctx._adiag_np  # [b, i, h] = sub_adj[b, i, i, h]
    aorig = ctx._aorig_np
    if variant == "global":
        count = {"1.on": n, "2.on": n - 1, "3.on": n - 1, "4.on": n * (n - 1)}[term]
        return np.full((b, n, 1), _count_recip(np.array(float(count))))
    if variant == "local_subgraph":
        deg = adiag.sum(axis=2)  # [b, i]
        if term == "4.on":
            inner = ctx._adiag_np.sum(axis=2)  # [b, h] neighbours of root h in subgraph h
            count = np.einsum("bih,bh->bi", adiag, inner)
        else:
            count = deg
        return _count_recip(count)[..., None]
    deg = aorig.sum(axis=2)  # [b, i]
    if term == "4.on":
        count = np.einsum("bih,bh->bi", aorig, deg)
    else:
        count = deg
    return _count_recip(count)[..., None]


def _mean_scale_off(term: str, variant: str, ctx: BagCtx) -> np.ndarray:
    """(B, n, n, 1) reciprocal summand counts for an off-diagonal aggregated term."""
    n, b = ctx.n, ctx.batch
    asub = ctx._asub_np
    aorig = ctx._aorig_np
    if variant == "global":
        count = {"1.off": n * (n - 1), "2.off": n - 1, "3.off": n - 1,
                 "4.off": n - 1, "5.off": n - 1, "6.off": n}[term]
        return np.full((b, n, n, 1), _count_recip(np.array(float(count))))
    if variant == "local_subgraph":
        deg = asub.sum(axis=3)  # [b, k, i]
        if term == "1.off":
            inner = asub.sum(axis=3)  # [b, h, i] neighbours of i in subgraph h
            count = np.einsum("bkih,bhi->bki", asub, inner)
        else:
            count = deg
        return _count_recip(count)[..., None]
    deg = aorig.sum(axis=2)  # [b, i]
    if term == "1.off":
        count = (deg ** 2)[:, None, :] * np.ones((1, n, 1))
    else:
        count = deg[:, None, :] * np.ones((1, n, 1))
    return _count_recip(count)[..., None]


def eval_on_term(term: ReignTerm, x: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """Value of an on-diagonal term, shape (B, n, d) indexed by the root i."""
    t, v = term.term, term.variant
    dv = core.diag_vec(x, ctx)
    if t == "self":
        out = dv
    elif t == "1.on":
        if v == "global":
            out = ag.sum_axis(dv, 1, keepdims=True)
        elif v == "local_subgraph":
            out = ag.matmul(ctx.adiag, dv)
        else:
            out = ag.matmul(ctx.aorig_m, ag.broadcast_axis(dv, 1, 1))
            out = ag.sum_axis(out, 1)
    elif t == "2.on":
        if v == "global":
            out = ag.subtract(ag.sum_axis(x, 2), dv)
        elif v == "local_subgraph":
            out = ag.sum_axis(ag.elementwise_multiply(x, ctx.adiag_mask), 2)
        else:
            out = ag.sum_axis(ag.elementwise_multiply(x, ctx.aorig_mask), 2)
    elif t == "3.on":
        if v == "global":
            out = ag.subtract(ag.sum_axis(x, 1), dv)
        elif v == "local_subgraph":
            out = ag.sum_axis(ag.elementwise_multiply(x, ctx.adiag_mask_t), 1)
        else:
            out = ag.sum_axis(ag.elementwise_multiply(x, ctx.aorig_mask), 1)
    elif t == "4.on":
        if v == "global":
            total = ag.sum_axis(ag.sum_axis(x, 1), 1, keepdims=True)
            out = ag.subtract(total, ag.sum_axis(dv, 1, keepdims=True))
        elif v == "local_subgraph":
            inner = ag.sum_axis(ag.elementwise_multiply(x, ctx.adiag_mask), 2)
            out = ag.matmul(ctx.adiag, inner)
        else:
            inner = ag.sum_axis(ag.elementwise_multiply(x, ctx.aorig_mask), 2)
            out = ag.sum_axis(ag.matmul(ctx.aorig_m, ag.broadcast_axis(inner, 1, 1)), 1)
    else:
        raise BadTerm(f"term {t} is not valid for the on-diagonal update")
    if term.agg == "mean":
        out = ag.elementwise_multiply(out, x.tape.constant(_mean_scale_on(t, v, ctx)))
    return out


def eval_off_term(term: ReignTerm, x: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """Value of an off-diagonal term, shape broadcastable to (B, n, n, d)."""
    t, v = term.term, term.variant
    if t == "self":
        return x
    if t == "transpose":
        return core.transpose_grid(x)
    if t == "root_of_subgraph":
        return core.as_cols(core.diag_vec(x, ctx), ctx)
    if t == "node_as_root":
        return core.as_rows(core.diag_vec(x, ctx), ctx)

    dv = core.diag_vec(x, ctx)
    if t == "1.off":
        if v == "global":
            total = ag.sum_axis(ag.sum_axis(x, 1, keepdims=True), 2, keepdims=True)
            out = ag.subtract(total, ag.sum_axis(ag.broadcast_axis(dv, 1, 1), 2, keepdims=True))
        elif v == "local_subgraph":
            inner = core.sub_msg(x, ctx)  # [b, h, i] = sum_{j ~_h i} x^h_j
            moved = ag.transpose(inner, (0, 2, 1, 3))
            out = ag.transpose(ag.matmul(ctx.asub_p, moved), (0, 2, 1, 3))
        else:
            inner = core.orig_msg(x, ctx)
            out = ag.sum_axis(ag.elementwise_multiply(inner, ctx.aorig_mask), 1, keepdims=True)
    elif t == "2.off":
        if v == "global":
            out = ag.subtract(core.col_sum(x), ag.broadcast_axis(dv, 1, 1))
        elif v == "local_subgraph":
            moved = ag.transpose(x, (0, 2, 1, 3))  # [b, i, h, d] = x^h_i
            out = ag.transpose(ag.matmul(ctx.asub_p, moved), (0, 2, 1, 3))
        else:
            out = ag.sum_axis(ag.elementwise_multiply(x, ctx.aorig_mask), 1, keepdims=True)
    elif t == "3.off":
        if v == "global":
            out = ag.subtract(core.row_sum(x), ag.broadcast_axis(dv, 2, 1))
        elif v == "local_subgraph":
            out = core.sub_msg(x, ctx)
        else:
            out = core.orig_msg(x, ctx)
    elif t == "4.off":
        rows = ag.sum_axis(x, 2)  # [b, s] = sum_h x^s_h
        if v == "global":
            out = core.as_rows(ag.subtract(rows, dv), ctx)
        elif v == "local_subgraph":
            out = ag.transpose(ag.matmul(ctx.asub_p, x), (0, 2, 1, 3))
        else:
            vloc = ag.sum_axis(ag.elementwise_multiply(x, ctx.aorig_mask), 2)
            out = core.as_rows(vloc, ctx)
    elif t == "5.off":
        cols = ag.sum_axis(x, 1)  # [b, v] = sum_h x^h_v
        xt = core.transpose_grid(x)  # [b, k, h, d] = x^h_k
        if v == "global":
            out = core.as_cols(ag.subtract(cols, dv), ctx)
        elif v == "local_subgraph":
            out = ag.matmul(ctx.asub, xt)
        else:
            out = ag.matmul(ctx.aorig_m, xt)
    elif t == "6.off":
        dvexp = ag.broadcast_axis(dv, 1, 1)
        if v == "global":
            out = ag.sum_axis(dvexp, 2, keepdims=True)
        elif v == "local_subgraph":
            out = ag.matmul(ctx.asub, dvexp)
        else:
            out = ag.matmul(ctx.aorig_m, dvexp)
    else:
        raise BadTerm(f"term {t} is not valid for the off-diagonal update")
    if term.agg == "mean":
        out = ag.elementwise_multiply(out, x.tape.constant(_mean_scale_off(t, v, ctx)))
    return out


def _lin(x: DiffTensor, w: DiffTensor) -> DiffTensor:
    return ag.matmul(x, ag.transpose(w, (1, 0)))


def reign2_core(spec: LayerSpec, params: dict, x: DiffTensor, ctx: BagCtx) -> DiffTensor:
    """Generic extended-2-IGN update; params maps weight names to DiffTensors.

    Term values may come back in broadcast-reduced shapes ((B,1,n,d), (B,n,d),
    (B,1,d), ...); adding a zero constant of the full target shape materialises
    them, with gradients handled by add's unbroadcast.
    """
    tape = x.tape
    n = ctx.n

    def accumulate(terms, bias_name, zero_shape):
        acc = None
        for term in terms:
            evaluate = eval_on_term if len(zero_shape) == 3 else eval_off_term
            val = _lin(evaluate(term, x, ctx), params[term.weight])
            acc = val if acc is None else ag.add(acc, val)
        if bias_name is not None:
            bias = params[bias_name]
            acc = bias if acc is None else ag.add(acc, bias)
        if acc is None:
            return None
        return ag.add(acc, tape.constant(np.zeros(zero_shape)))

    on_acc = accumulate(spec.on_terms, spec.bias_on, (1, n, 1))
    off_acc = accumulate(spec.off_terms, spec.bias_off, (1, n, n, 1))

    pieces = []
    if off_acc is not None:
        pieces.append(ag.elementwise_multiply(off_acc, ctx.offdiag_mask))
    if on_acc is not None:
        pieces.append(core.diag_embed(on_acc, ctx))
    if not pieces:
        out = ag.elementwise_multiply(x, tape.constant(np.zeros(1)))
    else:
        out = pieces[0]
        for p in pieces[1:]:
            out = ag.add(out, p)
    if spec.activation == "relu":
        out = ag.relu(out)
    return out


def reign2_layer(spec: LayerSpec, bag: SubgraphBag, params: dict) -> SubgraphBag:
    tape = Tape()
    ctx = core.make_ctx(tape, bag)
    x = core.grid_from_bag(tape, bag)
    tensors = {k: tape.constant(np.asarray(v, dtype=np.float64)) for k, v in params.items()}
    out = reign2_core(spec, tensors, x, ctx)
    return core.bag_with_features(bag, out.values)


def ign2_spec_check(spec: LayerSpec) -> None:
    for term in tuple(spec.on_terms) + tuple(spec.off_terms):
        if term.variant not in (None, "global"):
            raise NotAllowedInIGN2(f"term {term.term} uses local variant {term.variant}")


def ign2_layer(spec: LayerSpec, grid: np.ndarray, params: dict,
               orig_adj: np.ndarray | None = None) -> np.ndarray:
    """Plain 2-IGN layer on an n x n grid of node representations (global terms only)."""
    ign2_spec_check(spec)
    n = grid.shape[0]
    if orig_adj is None:
        orig_adj = np.zeros((n, n), dtype=np.bool_)
    tape = Tape()
    ctx = BagCtx(tape, np.zeros((n, n, n), dtype=np.bool_), orig_adj, None)
    x = tape.constant(grid[None])
    tensors = {k: tape.constant(np.asarray(v, dtype=np.float64)) for k, v in params.items()}
    out = reign2_core(spec, tensors, x, ctx)
    return out.values[0]
