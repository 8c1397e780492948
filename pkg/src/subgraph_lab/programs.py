"""Interpreted programmes over orbit tensors: lift, selection-policy programmes,
bag <-> orbit codecs and a ReLU-interleaving programme transformer.

A programme is an ordered list of steps.  Each step rebuilds every component of
the tensor as a sum of terms (pool -> broadcast -> channel-wise weight), adds
per-component biases, then applies pointwise ops.  Components without an
explicit update list are copied (channel-truncated or zero-padded to the step's
output width), mirroring the implicit-identity convention of layer listings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadSignature, ShapeMismatch, Unsupported, UnsupportedPolicy
from .graphs import Graph
from .orbit import (
    AXES,
    TAGS,
    OrbitTensor3,
    as_face,
    broadcast,
    pool,
    pw_clip1,
    pw_gate,
    pw_logical_and,
    pw_mlp,
    pw_relu,
)
from .policy import PolicyKind, SubgraphBag


@dataclass(frozen=True)
class Term:
    """dst[..., dst_ch] += weight(pool/broadcast(src[..., src_ch]))."""

    src: str
    src_ch: tuple[int, int]
    dst_ch: tuple[int, int]
    keep: tuple[str, ...] | None = None  # pool over the complement of these axes
    pattern: tuple[str, ...] | None = None  # broadcast/placement; None = same-tag identity
    scale: float = 1.0
    matrix: np.ndarray | None = None  # (dst width, src width); overrides scale

    def to_json(self) -> dict:
        doc = {
            "src": self.src,
            "src_ch": list(self.src_ch),
            "dst_ch": list(self.dst_ch),
            "keep": list(self.keep) if self.keep is not None else None,
            "pattern": ",".join(self.pattern) if self.pattern is not None else None,
            "scale": self.scale,
        }
        if self.matrix is not None:
            doc["matrix"] = np.asarray(self.matrix).tolist()
        return doc

    @staticmethod
    def from_json(doc: dict) -> "Term":
        return Term(
            src=doc["src"],
            src_ch=tuple(doc["src_ch"]),
            dst_ch=tuple(doc["dst_ch"]),
            keep=tuple(doc["keep"]) if doc.get("keep") is not None else None,
            pattern=tuple(doc["pattern"].split(",")) if doc.get("pattern") is not None else None,
            scale=doc.get("scale", 1.0),
            matrix=np.array(doc["matrix"], dtype=np.float64) if "matrix" in doc else None,
        )


@dataclass(frozen=True)
class Step:
    out_channels: int
    updates: dict = field(default_factory=dict)  # tag -> list[Term]; absent tag = identity copy
    biases: dict = field(default_factory=dict)  # tag -> (out_channels,) vector
    pointwise: tuple = ()  # ops applied in order after the linear part
    relu_all: bool = False

    def to_json(self) -> dict:
        pw = []
        for op in self.pointwise:
            kind = op[0]
            if kind == "mlp":
                _, tag, in_ch, out_ch, weights = op
                pw.append({
                    "op": "mlp", "component": tag, "in_ch": list(in_ch), "out_ch": list(out_ch),
                    "weights": [[np.asarray(w).tolist(), np.asarray(b).tolist()] for w, b in weights],
                })
            else:
                pw.append({"op": kind, "args": list(op[1:])})
        return {
            "out_channels": self.out_channels,
            "updates": {tag: [t.to_json() for t in terms] for tag, terms in self.updates.items()},
            "biases": {tag: np.asarray(b).tolist() for tag, b in self.biases.items()},
            "pointwise": pw,
            "relu_all": self.relu_all,
        }

    @staticmethod
    def from_json(doc: dict) -> "Step":
        pw = []
        for op in doc.get("pointwise", []):
            if op["op"] == "mlp":
                weights = [(np.array(w, dtype=np.float64), np.array(b, dtype=np.float64))
                           for w, b in op["weights"]]
                pw.append(("mlp", op["component"], tuple(op["in_ch"]), tuple(op["out_ch"]), weights))
            else:
                pw.append(tuple([op["op"]] + op["args"]))
        return Step(
            out_channels=doc["out_channels"],
            updates={tag: [Term.from_json(t) for t in terms] for tag, terms in doc.get("updates", {}).items()},
            biases={tag: np.array(b, dtype=np.float64) for tag, b in doc.get("biases", {}).items()},
            pointwise=tuple(pw),
            relu_all=doc.get("relu_all", False),
        )


@dataclass(frozen=True)
class Ign3Program:
    steps: tuple

    def to_json(self) -> list:
        return [s.to_json() for s in self.steps]

    @staticmethod
    def from_json(doc: list) -> "Ign3Program":
        return Ign3Program(tuple(Step.from_json(s) for s in doc))


def _apply_term(term: Term, y: OrbitTensor3, target_tag: str, out: np.ndarray) -> None:
    face = as_face(term.src, y.component(term.src))
    if term.keep is not None:
        face = pool(face, term.keep)
    if term.pattern is not None:
        tag, values = broadcast(face, term.pattern)
        if tag != target_tag:
            raise BadSignature(f"term pattern targets {tag}, update is for {target_tag}")
    else:
        if term.keep is None and term.src != target_tag:
            raise BadSignature(f"identity-placement term from {term.src} cannot target {target_tag}")
        if term.keep is not None:
            raise BadSignature("pooled term needs an explicit placement pattern")
        values = face.values
    a, b = term.src_ch
    e, f = term.dst_ch
    if b - a != f - e and term.matrix is None:
        raise BadSignature(f"channel ranges {term.src_ch}->{term.dst_ch} differ in width")
    sel = values[..., a:b]
    if term.matrix is not None:
        m = np.asarray(term.matrix, dtype=np.float64)
        if m.shape != (f - e, b - a):
            raise ShapeMismatch(f"term matrix {m.shape} != ({f - e}, {b - a})")
        sel = sel @ m.T
    elif term.scale != 1.0:
        sel = sel * term.scale
    out[..., e:f] += sel


def run_program(prog: Ign3Program, y: OrbitTensor3) -> OrbitTensor3:
    for step in prog.steps:
        n, c_in, c_out = y.n, y.d, step.out_channels
        new = {}
        for tag in TAGS:
            shape = (n,) * len(AXES[tag]) + (c_out,)
            out = np.zeros(shape)
            if tag in step.updates:
                terms = step.updates[tag]
            else:
                w = min(c_in, c_out)
                terms = [Term(src=tag, src_ch=(0, w), dst_ch=(0, w))]
            for term in terms:
                _apply_term(term, y, tag, out)
            if tag in step.biases:
                out = out + np.asarray(step.biases[tag], dtype=np.float64)
            new[tag] = out
        for op in step.pointwise:
            kind, tag = op[0], op[1]
            if kind == "and":
                new[tag] = pw_logical_and(new[tag], op[2], op[3], op[4])
            elif kind == "clip1":
                new[tag] = pw_clip1(new[tag], op[2])
            elif kind == "relu":
                new[tag] = pw_relu(new[tag], op[2])
            elif kind == "gate":
                new[tag] = pw_gate(new[tag], op[2], op[3])
            elif kind == "mlp":
                _, tag, in_ch, out_ch, weights = op
                res = pw_mlp(new[tag][..., in_ch[0]: in_ch[1]], weights)
                buf = np.array(new[tag])
                buf[..., out_ch[0]: out_ch[1]] = res
                new[tag] = buf
            else:
                raise BadSignature(f"unknown pointwise op {kind!r}")
        if step.relu_all:
            new = {tag: np.maximum(arr, 0.0) for tag, arr in new.items()}
        y = OrbitTensor3.from_components(new)
    return y


# ---------------------------------------------------------------------------
# lift and bag codecs
#
# Channel conventions (per component; components have independent channel
# semantics but share one width):
#   iii / ijj : feature channels 0..d'-1
#   iij       : 0 = subgraph connectivity, 1 = membership (ego kinds),
#               2 = retained original connectivity (ego kinds)
#   iji / ijk : 0 = subgraph connectivity, 2 = retained original (ego kinds)


def lift(g: Graph) -> OrbitTensor3:
    """Null-policy lift of a graph: features on the diagonal components, the
    adjacency in channel 0 of the connectivity components, broadcast along the
    subgraph axis."""
    n, d = g.n, max(g.d, 1)
    a = g.adjacency.astype(np.float64)
    comp = {
        "iii": np.zeros((n, d)),
        "iij": np.zeros((n, n, d)),
        "iji": np.zeros((n, n, d)),
        "ijj": np.zeros((n, n, d)),
        "ijk": np.zeros((n, n, n, d)),
    }
    if g.d:
        comp["iii"][:, : g.d] = g.features
        comp["ijj"][:, :, : g.d] = np.broadcast_to(g.features[None, :, :], (n, n, g.d))
    comp["iij"][:, :, 0] = a
    comp["iji"][:, :, 0] = a
    comp["ijk"][:, :, :, 0] = np.broadcast_to(a[None, :, :], (n, n, n))
    return OrbitTensor3.from_components(comp)


def encode_bag(bag: SubgraphBag) -> OrbitTensor3:
    """Orbit-tensor form of a bag: features on iii/ijj, connectivity on iij/iji/ijk,
    plus membership and retained original connectivity channels for ego kinds."""
    n, d = bag.n, bag.d
    ego = bag.policy.kind in ("EGO", "EGOP")
    c = max(d, 3) if ego else max(d, 1)
    comp = {
        "iii": np.zeros((n, c)),
        "iij": np.zeros((n, n, c)),
        "iji": np.zeros((n, n, c)),
        "ijj": np.zeros((n, n, c)),
        "ijk": np.zeros((n, n, n, c)),
    }
    idx = np.arange(n)
    comp["iii"][:, :d] = bag.sub_feat[idx, idx]
    comp["ijj"][:, :, :d] = bag.sub_feat
    comp["iij"][:, :, 0] = bag.sub_adj[idx, idx, :]
    comp["iji"][:, :, 0] = bag.sub_adj[idx, :, idx]
    comp["ijk"][:, :, :, 0] = bag.sub_adj
    if ego:
        comp["iij"][:, :, 1] = bag.membership
        orig = bag.orig_adj.astype(np.float64)
        comp["iij"][:, :, 2] = orig
        comp["iji"][:, :, 2] = orig
        comp["ijk"][:, :, :, 2] = np.broadcast_to(orig[None, :, :], (n, n, n))
    return OrbitTensor3.from_components(comp)


def decode_bag(y: OrbitTensor3, d_feat: int, kind: PolicyKind) -> SubgraphBag:
    """Inverse of encode_bag.  Connectivity and membership channels are read
    through a 0.5 threshold; feature channels are taken verbatim.  For ND the
    original adjacency is reconstructed from ijk, which needs n >= 3."""
    n = y.n
    if d_feat > y.d:
        raise ShapeMismatch(f"d_feat={d_feat} exceeds channel width {y.d}")
    idx = np.arange(n)
    feat = np.array(y.x_ijj[:, :, :d_feat])
    feat[idx, idx] = y.x_iii[:, :d_feat]
    sub_adj = y.x_ijk[:, :, :, 0] > 0.5
    sub_adj[idx, idx, :] = y.x_iij[:, :, 0] > 0.5
    sub_adj[idx, :, idx] = y.x_iji[:, :, 0] > 0.5
    if kind.kind in ("EGO", "EGOP"):
        membership = y.x_iij[:, :, 1] > 0.5
        membership[idx, idx] = True
        orig = y.x_iij[:, :, 2] > 0.5
    elif kind.kind == "ND":
        membership = ~np.eye(n, dtype=np.bool_)
        orig = sub_adj.any(axis=0)
    else:
        membership = np.ones((n, n), dtype=np.bool_)
        orig = sub_adj[0].copy() if n else np.zeros((0, 0), dtype=np.bool_)
    return SubgraphBag(sub_adj, feat, membership, orig, kind)


# ---------------------------------------------------------------------------
# selection-policy programmes


def _route(tag: str, src, dst) -> Term:
    return Term(src=tag, src_ch=tuple(src), dst_ch=tuple(dst))


def policy_program(kind: PolicyKind, d_feat: int) -> Ign3Program:
    """Programme that maps lift(G) to the orbit encoding of apply_policy(G, kind).

    ``d_feat`` is the input graph's feature width (the lift carries
    max(d_feat, 1) channels); routing depends on it, hence the extra argument.
    """
    d = d_feat
    c_in = max(d, 1)
    if kind.kind == "NULL":
        return Ign3Program(())
    if kind.kind == "ND":
        return Ign3Program((Step(out_channels=c_in, updates={"iij": [], "iji": []}),))
    if kind.kind == "NM":
        mark = np.zeros(d + 1)
        mark[d] = 1.0
        return Ign3Program((Step(out_channels=d + 1, biases={"iii": mark}),))
    if kind.kind not in ("EGO", "EGOP"):
        raise UnsupportedPolicy(kind.kind)

    h = kind.h
    r = max(d, 3)  # reachability channel on ijj; scratch channel index on ijk
    c_work = r + 1
    steps = []
    # expand: retain original connectivity in channel 2, seed 1-hop reachability
    steps.append(Step(
        out_channels=c_work,
        updates={
            "iij": [_route("iij", (0, 1), (0, 1)), _route("iij", (0, 1), (2, 3))],
            "iji": [_route("iji", (0, 1), (0, 1)), _route("iji", (0, 1), (2, 3))],
            "ijk": [_route("ijk", (0, 1), (0, 1)), _route("ijk", (0, 1), (2, 3))],
            "ijj": [_route("ijj", (0, d), (0, d)),
                    Term(src="iij", src_ch=(0, 1), dst_ch=(r, r + 1), pattern=("i", "j", "j"))],
        },
    ))
    for _ in range(h - 1):
        # propagate the reachability pattern row-wise, AND with the connectivity
        steps.append(Step(
            out_channels=c_work,
            updates={"ijk": [
                _route("ijk", (0, 1), (0, 1)), _route("ijk", (2, 3), (2, 3)),
                Term(src="ijj", src_ch=(r, r + 1), dst_ch=(1, 2), pattern=("i", "*", "j")),
            ]},
            pointwise=(("and", "ijk", 0, 1, 1),),
        ))
        # count reached neighbours, accumulate, clip to 1
        steps.append(Step(
            out_channels=c_work,
            updates={"ijj": [
                _route("ijj", (0, c_work), (0, c_work)),
                Term(src="ijk", src_ch=(1, 2), dst_ch=(r, r + 1), keep=("i", "j"), pattern=("i", "j", "j")),
            ]},
            pointwise=(("clip1", "ijj", [r]),),
        ))
    # egonet extraction: null out non-root connectivity touching unreached nodes
    steps.append(Step(
        out_channels=c_work,
        updates={"ijk": [
            _route("ijk", (0, 1), (0, 1)), _route("ijk", (2, 3), (2, 3)),
            Term(src="ijj", src_ch=(r, r + 1), dst_ch=(1, 2), pattern=("i", "j", "*")),
        ]},
        pointwise=(("and", "ijk", 0, 1, 1),),
    ))
    steps.append(Step(
        out_channels=c_work,
        updates={"ijk": [
            _route("ijk", (1, 2), (1, 2)), _route("ijk", (2, 3), (2, 3)),
            Term(src="ijj", src_ch=(r, r + 1), dst_ch=(r, r + 1), pattern=("i", "*", "j")),
        ]},
        pointwise=(("and", "ijk", 1, r, 0),),
    ))
    # write membership into channel 1 of iij, trim the scratch channels
    c_out = max(d, 3)
    steps.append(Step(
        out_channels=c_out,
        updates={
            "iii": [_route("iii", (0, d), (0, d))],
            "ijj": [_route("ijj", (0, d), (0, d))],
            "iij": [_route("iij", (0, 1), (0, 1)), _route("iij", (2, 3), (2, 3)),
                    Term(src="ijj", src_ch=(r, r + 1), dst_ch=(1, 2), pattern=("i", "i", "j"))],
            "iji": [_route("iji", (0, 1), (0, 1)), _route("iji", (2, 3), (2, 3))],
            "ijk": [_route("ijk", (0, 1), (0, 1)), _route("ijk", (2, 3), (2, 3))],
        },
    ))
    if kind.kind == "EGOP":
        mark = np.zeros(max(d + 1, 3))
        mark[d] = 1.0
        steps.append(Step(out_channels=max(d + 1, 3), biases={"iii": mark}))
    return Ign3Program(tuple(steps))


def policy_output_width(kind: PolicyKind, d_feat: int) -> int:
    """Feature width d' of the bag a policy programme (or apply_policy) produces."""
    return d_feat + 1 if kind.marks_root else d_feat


# ---------------------------------------------------------------------------
# ReLU interleaving
#
# Doubles channels so every value is carried as (relu(x), relu(-x)); linear
# steps act blockwise as [[W, -W], [-W, W]] and a ReLU after every step is then
# harmless.  Exactness note: per entry one half is zero, so routing/scaling
# steps (all selection programmes) reproduce the original outputs bit for bit;
# general matrices agree up to the usual float re-association error.


def _materialized_updates(step: Step, c_in: int) -> dict:
    out = {}
    w = min(c_in, step.out_channels)
    for tag in TAGS:
        out[tag] = list(step.updates.get(tag, [Term(src=tag, src_ch=(0, w), dst_ch=(0, w))]))
    return out


def relu_interleave(prog: Ign3Program, c_in: int) -> Ign3Program:
    """Transform a gate-free linear programme into a strictly ReLU-interleaved one
    computing the same function.  ``c_in`` is the programme's input width."""
    for step in prog.steps:
        if step.pointwise or step.relu_all:
            raise Unsupported("relu_interleave applies to purely linear programmes")

    steps = []
    eye = np.eye(c_in)
    expand = {tag: [Term(src=tag, src_ch=(0, c_in), dst_ch=(0, c_in), matrix=eye),
                    Term(src=tag, src_ch=(0, c_in), dst_ch=(c_in, 2 * c_in), matrix=-eye)]
              for tag in TAGS}
    steps.append(Step(out_channels=2 * c_in, updates=expand, relu_all=True))

    width = c_in
    for step in prog.steps:
        c_out = step.out_channels
        updates = {}
        for tag, terms in _materialized_updates(step, width).items():
            new_terms = []
            for t in terms:
                a, b = t.src_ch
                e, f = t.dst_ch
                if t.matrix is not None:
                    m = np.asarray(t.matrix, dtype=np.float64)
                else:
                    m = np.eye(f - e) * t.scale
                for src_off, dst_off, sign in (
                    (0, 0, 1.0), (width, 0, -1.0), (0, c_out, -1.0), (width, c_out, 1.0),
                ):
                    new_terms.append(Term(
                        src=t.src, keep=t.keep, pattern=t.pattern,
                        src_ch=(a + src_off, b + src_off),
                        dst_ch=(e + dst_off, f + dst_off),
                        matrix=sign * m,
                    ))
            updates[tag] = new_terms
        biases = {}
        for tag, bvec in step.biases.items():
            bvec = np.asarray(bvec, dtype=np.float64)
            biases[tag] = np.concatenate([bvec, -bvec])
        steps.append(Step(out_channels=2 * c_out, updates=updates, biases=biases, relu_all=True))
        width = c_out

    contract = {tag: [Term(src=tag, src_ch=(0, width), dst_ch=(0, width), matrix=np.eye(width)),
                      Term(src=tag, src_ch=(width, 2 * width), dst_ch=(0, width), matrix=-np.eye(width))]
                for tag in TAGS}
    steps.append(Step(out_channels=width, updates=contract))
    return Ign3Program(tuple(steps))
