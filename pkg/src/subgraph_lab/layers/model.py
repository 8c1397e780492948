"""End-to-end models: policy -> layer stack -> invariant pooling -> head.

Configs are plain dicts (JSON-friendly); weights live in a flat name -> array
dict so checkpoints and the optimizer stay trivial.  Weight matrices draw from
N(0, 1/fan_in), biases start at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import autograd as ag
from ..autograd import DiffTensor, Tape
from ..errors import ShapeMismatch, Unsupported
from ..graphs import Graph
from ..policy import PolicyKind, SubgraphBag, apply_policy
from ..rng import Rng
from . import core
from .baselines import ds_core, dss_core, morris_core
from .reign import PoolingSpec
from .sun import DEFAULT_AGGREGATORS, sun_core


@dataclass(frozen=True)
class LayerDesc:
    kind: str  # SUN | DS | DSS
    mode: str  # linear | expressive (SUN only)
    d_in: int
    d_out: int
    prefix: str
    activation: str = "relu"


@dataclass(frozen=True)
class Model:
    policy: PolicyKind
    layers: tuple
    pooling: PoolingSpec
    head_hidden: int
    out_dim: int | None  # None = raw pooled embedding
    aggregators: dict
    params: dict = field(default_factory=dict)

    def with_params(self, params: dict) -> "Model":
        return Model(self.policy, self.layers, self.pooling, self.head_hidden,
                     self.out_dim, self.aggregators, params)


def _init_matrix(rng: Rng, d_out: int, d_in: int) -> np.ndarray:
    return rng.normals((d_out, d_in)) * np.sqrt(1.0 / d_in)


def _init_mlp2(params: dict, rng: Rng, prefix: str, d_in: int, hidden: int, d_out: int) -> None:
    params[f"{prefix}.w1"] = _init_matrix(rng, hidden, d_in)
    params[f"{prefix}.b1"] = np.zeros(hidden)
    params[f"{prefix}.w2"] = _init_matrix(rng, d_out, hidden)
    params[f"{prefix}.b2"] = np.zeros(d_out)


SUN_LINEAR_NAMES = ("u0", "u1", "u2", "u3", "u4", "u5", "u6",
                    "u2_r", "u3_r", "u4_r", "u5_r", "u6_r")
SUN_EXPRESSIVE_PREFIXES = ("mu0", "mu1", "mu2", "mu3", "gin0", "gin1",
                           "mu2_r", "mu3_r", "gin0_r", "gin1_r")


def _init_layer(params: dict, rng: Rng, desc: LayerDesc) -> None:
    if desc.kind == "SUN" and desc.mode == "linear":
        for name in SUN_LINEAR_NAMES:
            params[f"{desc.prefix}.{name}"] = _init_matrix(rng, desc.d_out, desc.d_in)
        params[f"{desc.prefix}.bias"] = np.zeros(desc.d_out)
        params[f"{desc.prefix}.bias_r"] = np.zeros(desc.d_out)
    elif desc.kind == "SUN" and desc.mode == "expressive":
        for prefix in SUN_EXPRESSIVE_PREFIXES:
            _init_mlp2(params, rng, f"{desc.prefix}.{prefix}", desc.d_in, desc.d_out, desc.d_out)
    elif desc.kind == "DS":
        params[f"{desc.prefix}.w1"] = _init_matrix(rng, desc.d_out, desc.d_in)
        params[f"{desc.prefix}.w2"] = _init_matrix(rng, desc.d_out, desc.d_in)
    elif desc.kind == "DSS":
        for name in ("w1_sub", "w2_sub", "w1_cross", "w2_cross"):
            params[f"{desc.prefix}.{name}"] = _init_matrix(rng, desc.d_out, desc.d_in)
    else:
        raise Unsupported(f"model layer kind {desc.kind!r}")


def build_model(config: dict, d_in: int, seed: int) -> Model:
    """Materialise a model (with freshly drawn weights) from a config dict."""
    policy = PolicyKind.parse(config["policy"])
    lcfg = config.get("layers", {})
    kind = lcfg.get("kind", "SUN")
    mode = lcfg.get("mode", "linear")
    width = lcfg.get("width", 16)
    count = lcfg.get("count", 3)
    activation = lcfg.get("activation", "relu")
    d_feat = d_in + (1 if policy.marks_root else 0)

    descs = []
    for t in range(count):
        descs.append(LayerDesc(kind, mode, d_feat if t == 0 else width, width,
                               f"layer{t}", activation))
    pcfg = config.get("pooling", {})
    pooling = PoolingSpec(pcfg.get("kind", "ROOT_POOL"),
                          member_masked=pcfg.get("member_masked", False),
                          phi_hidden=pcfg.get("phi_hidden", 0),
                          outer_layers=pcfg.get("outer_layers", 0))
    hcfg = config.get("head", {})
    head_hidden = hcfg.get("hidden", 0)
    out_dim = hcfg.get("out")
    aggregators = config.get("aggregators", dict(DEFAULT_AGGREGATORS[mode]))

    rng = Rng(seed).substream("weights")
    params: dict = {}
    for desc in descs:
        _init_layer(params, rng, desc)
    feat_width = width if count else d_feat
    if pooling.kind == "SUBGRAPH_READOUT_DEEPSETS" and pooling.phi_hidden:
        _init_mlp2(params, rng, "phi", feat_width, pooling.phi_hidden, feat_width)
    if pooling.kind == "NGNN_OUTER":
        for t in range(pooling.outer_layers):
            params[f"outer{t}.w1"] = _init_matrix(rng, feat_width, feat_width)
            params[f"outer{t}.w2"] = _init_matrix(rng, feat_width, feat_width)
    if out_dim is not None:
        if head_hidden:
            _init_mlp2(params, rng, "head", feat_width, head_hidden, out_dim)
        else:
            params["head.w"] = _init_matrix(rng, out_dim, feat_width)
            params["head.b"] = np.zeros(out_dim)
    return Model(policy, tuple(descs), pooling, head_hidden, out_dim, aggregators, params)


# ---------------------------------------------------------------------------
# forward passes


def _sub(params: dict, prefix: str) -> dict:
    plen = len(prefix) + 1
    return {k[plen:]: v for k, v in params.items() if k.startswith(prefix + ".")}


def _mlp2_apply(x: DiffTensor, p: dict, prefix: str) -> DiffTensor:
    h = ag.relu(ag.add(ag.matmul(x, ag.transpose(p[f"{prefix}.w1"], (1, 0))), p[f"{prefix}.b1"]))
    return ag.add(ag.matmul(h, ag.transpose(p[f"{prefix}.w2"], (1, 0))), p[f"{prefix}.b2"])


def apply_layer_core(desc: LayerDesc, params: dict, x: DiffTensor, ctx, aggregators: dict) -> DiffTensor:
    p = {k[len(desc.prefix) + 1:]: v for k, v in params.items() if k.startswith(desc.prefix + ".")}
    if desc.kind == "SUN":
        return sun_core(p, x, ctx, desc.mode, desc.activation, aggregators)
    if desc.kind == "DS":
        return ds_core(ctx, x, p["w1"], p["w2"], desc.activation)
    if desc.kind == "DSS":
        return dss_core(ctx, x, p["w1_sub"], p["w2_sub"], p["w1_cross"], p["w2_cross"],
                        desc.activation)
    raise Unsupported(desc.kind)


def pool_core(model: Model, params: dict, x: DiffTensor, ctx) -> DiffTensor:
    kind = model.pooling.kind
    if kind == "ROOT_POOL":
        return ag.sum_axis(core.diag_vec(x, ctx), 1)
    if kind == "SUBGRAPH_READOUT_DEEPSETS":
        if model.pooling.member_masked and ctx.member_mask is not None:
            per_sub = ag.sum_axis(ag.elementwise_multiply(x, ctx.member_mask), 2)
        else:
            per_sub = ag.sum_axis(x, 2)
        if model.pooling.phi_hidden:
            per_sub = _mlp2_apply(per_sub, params, "phi")
        return ag.sum_axis(per_sub, 1)
    if kind == "NGNN_OUTER":
        if model.pooling.member_masked and ctx.member_mask is not None:
            v = ag.sum_axis(ag.elementwise_multiply(x, ctx.member_mask), 2)
        else:
            v = ag.sum_axis(x, 2)
        adj = ctx.aorig_m  # (B, 1, n, n)
        adj2 = ag.sum_axis(adj, 1)  # (B, n, n)
        for t in range(model.pooling.outer_layers):
            v = morris_core(params[f"outer{t}.w1"], params[f"outer{t}.w2"], adj2, v)
        return ag.sum_axis(v, 1)
    raise Unsupported(kind)


def head_core(model: Model, params: dict, pooled: DiffTensor) -> DiffTensor:
    if model.out_dim is None:
        return pooled
    if model.head_hidden:
        return _mlp2_apply(pooled, params, "head")
    return ag.add(ag.matmul(pooled, ag.transpose(params["head.w"], (1, 0))), params["head.b"])


def model_forward_core(model: Model, tape: Tape, params: dict, x: DiffTensor, ctx) -> DiffTensor:
    for desc in model.layers:
        x = apply_layer_core(desc, params, x, ctx, model.aggregators)
    pooled = pool_core(model, params, x, ctx)
    return head_core(model, params, pooled)


def model_forward_bag(model: Model, bag: SubgraphBag) -> np.ndarray:
    tape = Tape()
    ctx = core.make_ctx(tape, bag)
    x = core.grid_from_bag(tape, bag)
    tensors = {k: tape.constant(v) for k, v in model.params.items()}
    out = model_forward_core(model, tape, tensors, x, ctx)
    return out.values[0]


def model_forward(model: Model, g: Graph) -> np.ndarray:
    """Graph embedding / prediction: policy, layer stack, pooling, head."""
    if model.layers and g.d + (1 if model.policy.marks_root else 0) != model.layers[0].d_in:
        raise ShapeMismatch(
            f"graph features ({g.d}) do not match the model input width ({model.layers[0].d_in})")
    return model_forward_bag(model, apply_policy(g, model.policy))
