"""Node-based subgraph selection policies and the root-aligned bag they produce.

A bag holds n subgraphs of an n-node graph, subgraph i rooted at node i.  The
dense representation keeps a slot for every node in every subgraph; nodes that
a policy removes (ND's root, nodes outside an ego ball) stay in the tensors and
are masked out through ``membership``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBag, InvalidNode, ShapeMismatch, UnsupportedPolicy
from .graphs import Graph, Permutation


@dataclass(frozen=True)
class PolicyKind:
    kind: str  # ND | NM | EGO | EGOP | NULL
    h: int | None = None  # depth, ego variants only

    def __post_init__(self):
        if self.kind not in ("ND", "NM", "EGO", "EGOP", "NULL"):
            raise UnsupportedPolicy(f"unknown policy kind {self.kind!r}")
        if self.kind in ("EGO", "EGOP"):
            if self.h is None or self.h < 1:
                raise UnsupportedPolicy(f"{self.kind} needs depth h >= 1")
        elif self.h is not None:
            raise UnsupportedPolicy(f"{self.kind} takes no depth")

    @property
    def marks_root(self) -> bool:
        return self.kind in ("NM", "EGOP")

    def serialize(self) -> str:
        if self.kind == "EGO":
            return f"EGO:{self.h}"
        if self.kind == "EGOP":
            return f"EGO+:{self.h}"
        return self.kind

    @staticmethod
    def parse(text: str) -> "PolicyKind":
        if text in ("ND", "NM", "NULL"):
            return PolicyKind(text)
        for prefix, kind in (("EGO+:", "EGOP"), ("EGO:", "EGO")):
            if text.startswith(prefix):
                return PolicyKind(kind, int(text[len(prefix) :]))
        raise UnsupportedPolicy(f"cannot parse policy {text!r}")


ND = PolicyKind("ND")
NM = PolicyKind("NM")
NULL = PolicyKind("NULL")


def EGO(h: int) -> PolicyKind:
    return PolicyKind("EGO", h)


def EGOP(h: int) -> PolicyKind:
    return PolicyKind("EGOP", h)


@dataclass(frozen=True)
class SubgraphBag:
    sub_adj: np.ndarray  # (n, n, n) bool; [i] = adjacency of subgraph rooted at i
    sub_feat: np.ndarray  # (n, n, d') float64; [i, j] = features of node j in subgraph i
    membership: np.ndarray | None  # (n, n) bool; node j present in subgraph i
    orig_adj: np.ndarray  # (n, n) bool, the input graph's adjacency
    policy: PolicyKind

    def __post_init__(self):
        n = self.sub_adj.shape[0]
        if self.sub_adj.shape != (n, n, n):
            raise ShapeMismatch(f"sub_adj shape {self.sub_adj.shape}")
        if self.sub_feat.shape[:2] != (n, n):
            raise ShapeMismatch(f"sub_feat shape {self.sub_feat.shape}")
        if self.membership is not None and self.membership.shape != (n, n):
            raise ShapeMismatch(f"membership shape {self.membership.shape}")
        if self.orig_adj.shape != (n, n):
            raise ShapeMismatch(f"orig_adj shape {self.orig_adj.shape}")
        for arr in (self.sub_adj, self.sub_feat, self.membership, self.orig_adj):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.sub_adj.shape[0]

    @property
    def d(self) -> int:
        return self.sub_feat.shape[2]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubgraphBag):
            return NotImplemented
        if self.membership is None or other.membership is None:
            memb_eq = self.membership is other.membership
        else:
            memb_eq = np.array_equal(self.membership, other.membership)
        return (
            self.policy == other.policy
            and memb_eq
            and np.array_equal(self.sub_adj, other.sub_adj)
            and np.array_equal(self.sub_feat, other.sub_feat)
            and np.array_equal(self.orig_adj, other.orig_adj)
        )


def ego_ball(g: Graph, v: int, h: int) -> set[int]:
    """Nodes at BFS distance <= h from v."""
    if not (0 <= v < g.n):
        raise InvalidNode(f"node {v} out of range for n={g.n}")
    reached = np.zeros(g.n, dtype=np.bool_)
    reached[v] = True
    frontier = reached.copy()
    for _ in range(h):
        nxt = g.adjacency[frontier].any(axis=0) & ~reached
        if not nxt.any():
            break
        reached |= nxt
        frontier = nxt
    return {int(u) for u in np.nonzero(reached)[0]}


def _ego_reach(adj: np.ndarray, h: int) -> np.ndarray:
    """reach[i, j] = True iff dist(i, j) <= h (diagonal included)."""
    n = adj.shape[0]
    adj_i = adj.astype(np.int64)
    reach = np.eye(n, dtype=np.bool_)
    for _ in range(h):
        reach = reach | ((reach.astype(np.int64) @ adj_i) > 0)
    return reach


def apply_policy(g: Graph, kind: PolicyKind) -> SubgraphBag:
    """Build the root-aligned bag {f(G, i)}_i for a policy in Pi or NULL."""
    n, a = g.n, g.adjacency
    if kind.kind == "ND" and n < 2:
        raise DegenerateBag("node deletion needs n >= 2")

    feat = np.broadcast_to(g.features, (n, n, g.d)).copy()
    if kind.marks_root:
        mark = np.eye(n, dtype=np.float64)[:, :, None]
        feat = np.concatenate([feat, mark], axis=2)

    if kind.kind in ("NULL", "NM"):
        sub_adj = np.broadcast_to(a, (n, n, n)).copy()
        membership = np.ones((n, n), dtype=np.bool_)
    elif kind.kind == "ND":
        sub_adj = np.broadcast_to(a, (n, n, n)).copy()
        idx = np.arange(n)
        sub_adj[idx, idx, :] = False
        sub_adj[idx, :, idx] = False
        membership = ~np.eye(n, dtype=np.bool_)
    elif kind.kind in ("EGO", "EGOP"):
        reach = _ego_reach(a, kind.h)
        pair_mask = reach[:, :, None] & reach[:, None, :]
        sub_adj = np.broadcast_to(a, (n, n, n)) & pair_mask
        membership = reach.copy()
    else:  # pragma: no cover
        raise UnsupportedPolicy(kind.kind)

    return SubgraphBag(sub_adj, feat, membership, a.copy(), kind)


def bag_apply_permutation(bag: SubgraphBag, sigma: Permutation) -> SubgraphBag:
    """Diagonal action: the same sigma on the subgraph axis and every node axis."""
    if sigma.n != bag.n:
        raise ShapeMismatch(f"permutation size {sigma.n} != bag size {bag.n}")
    inv = sigma.inverse
    memb = None if bag.membership is None else bag.membership[np.ix_(inv, inv)].copy()
    return SubgraphBag(
        bag.sub_adj[np.ix_(inv, inv, inv)].copy(),
        bag.sub_feat[np.ix_(inv, inv)].copy(),
        memb,
        bag.orig_adj[np.ix_(inv, inv)].copy(),
        bag.policy,
    )
