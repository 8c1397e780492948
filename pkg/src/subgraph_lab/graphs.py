"""Graph representation, permutation action, deterministic generators and JSON IO.

Graphs are simple, undirected and node-attributed, held as a dense boolean
adjacency plus a float64 feature matrix (one row per node).  Everything here is
immutable after construction and pure given (params, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidEdge,
    InvalidProbability,
    ParseError,
    SelfLoopRejected,
    ShapeMismatch,
    TooSmall,
)
from .rng import Rng


@dataclass(frozen=True)
class Graph:
    adjacency: np.ndarray  # (n, n) bool, symmetric, zero diagonal
    features: np.ndarray  # (n, d) float64

    def __post_init__(self):
        a = self.adjacency
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeMismatch(f"adjacency must be square, got {a.shape}")
        if a.dtype != np.bool_:
            raise ShapeMismatch("adjacency must be boolean")
        if not np.array_equal(a, a.T):
            raise ShapeMismatch("adjacency must be symmetric")
        if a.diagonal().any():
            raise SelfLoopRejected("adjacency has a nonzero diagonal")
        if self.features.ndim != 2 or self.features.shape[0] != a.shape[0]:
            raise ShapeMismatch(
                f"features must have {a.shape[0]} rows, got {self.features.shape}"
            )
        self.adjacency.setflags(write=False)
        self.features.setflags(write=False)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(u), int(v)) for u, v in zip(iu, ju)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency) and np.array_equal(
            self.features, other.features
        )


@dataclass(frozen=True)
class Permutation:
    mapping: np.ndarray = field()  # (n,) ints, a bijection on [0, n)

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64)
        object.__setattr__(self, "mapping", m)
        if m.ndim != 1 or not np.array_equal(np.sort(m), np.arange(len(m))):
            raise ShapeMismatch("mapping is not a bijection on [0, n)")
        m.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.mapping)

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.mapping] = np.arange(self.n)
        return inv

    def compose(self, other: "Permutation") -> "Permutation":
        """(self o other)(i) = self(other(i))."""
        if self.n != other.n:
            raise ShapeMismatch("permutation sizes differ")
        return Permutation(self.mapping[other.mapping])

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(np.arange(n))

    @staticmethod
    def random(n: int, rng: Rng) -> "Permutation":
        return Permutation(np.array(rng.permutation(n), dtype=np.int64))


def new_graph(n: int, edges, features=None) -> Graph:
    """Build a graph from an unordered edge list; features default to one constant 1.0 channel."""
    adj = np.zeros((n, n), dtype=np.bool_)
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidEdge(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise SelfLoopRejected(f"self-loop ({u}, {u})")
        adj[u, v] = True
        adj[v, u] = True
    if features is None:
        feats = np.ones((n, 1), dtype=np.float64)
    else:
        feats = np.asarray(features, dtype=np.float64)
        if feats.ndim == 1:
            feats = feats[:, None]
        if feats.shape[0] != n:
            raise ShapeMismatch(f"expected {n} feature rows, got {feats.shape[0]}")
    return Graph(adj, feats)


def apply_permutation(g: Graph, sigma: Permutation) -> Graph:
    """Relabel nodes: adjacency'[s(u), s(v)] = adjacency[u, v], features'[s(u)] = features[u]."""
    if sigma.n != g.n:
        raise ShapeMismatch(f"permutation size {sigma.n} != graph size {g.n}")
    inv = sigma.inverse
    return Graph(g.adjacency[np.ix_(inv, inv)].copy(), g.features[inv].copy())


# ---------------------------------------------------------------------------
# deterministic generators


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with one uniform draw per pair (i < j, ascending), from the repo PRNG."""
    if not (0.0 <= p <= 1.0):
        raise InvalidProbability(f"p={p} outside [0, 1]")
    rng = Rng(seed).substream("data.erdos_renyi")
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.uniform() < p:
                edges.append((i, j))
    return new_graph(n, edges)


def cycle(n: int) -> Graph:
    if n < 3:
        raise TooSmall(f"cycle needs n >= 3, got {n}")
    return new_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return new_graph(n, [(i, i + 1) for i in range(n - 1)])


def star(k: int) -> Graph:
    """K_{1,k}: center node 0 with k leaves."""
    if k < 1:
        raise TooSmall(f"star needs k >= 1, got {k}")
    return new_graph(k + 1, [(0, i) for i in range(1, k + 1)])


def complete(n: int) -> Graph:
    return new_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    if g1.d != g2.d:
        raise ShapeMismatch("feature widths differ")
    n = g1.n + g2.n
    adj = np.zeros((n, n), dtype=np.bool_)
    adj[: g1.n, : g1.n] = g1.adjacency
    adj[g1.n :, g1.n :] = g2.adjacency
    feats = np.concatenate([g1.features, g2.features], axis=0)
    return Graph(adj, feats)


def rook_4x4() -> Graph:
    """Rook's graph on a 4x4 board: (i, j) ~ (k, l) iff same row or same column."""
    edges = []
    for a in range(16):
        for b in range(a + 1, 16):
            if a // 4 == b // 4 or a % 4 == b % 4:
                edges.append((a, b))
    return new_graph(16, edges)


def shrikhande() -> Graph:
    """Cayley graph on Z4 x Z4 with connection set {+-(1,0), +-(0,1), +-(1,1)}."""
    conn = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    edges = []
    for a in range(16):
        for b in range(a + 1, 16):
            dx = (a // 4 - b // 4) % 4
            dy = (a % 4 - b % 4) % 4
            if (dx, dy) in conn:
                edges.append((a, b))
    return new_graph(16, edges)


def srg_parameters(g: Graph):
    """Brute-force strongly-regular parameters (v, k, lam, mu), or None if not an SRG."""
    a = g.adjacency
    n = g.n
    degs = a.sum(axis=1)
    if n == 0 or degs.min() != degs.max():
        return None
    k = int(degs[0])
    common = (a.astype(np.int64) @ a.astype(np.int64))
    lam_vals = common[a]
    off = ~a & ~np.eye(n, dtype=np.bool_)
    mu_vals = common[off]
    if lam_vals.size and lam_vals.min() != lam_vals.max():
        return None
    if mu_vals.size and mu_vals.min() != mu_vals.max():
        return None
    lam = int(lam_vals[0]) if lam_vals.size else 0
    mu = int(mu_vals[0]) if mu_vals.size else 0
    return (n, k, lam, mu)


def neighborhood_subgraph(g: Graph, v: int) -> Graph:
    """Induced subgraph on the neighbors of v (v excluded)."""
    nbrs = np.nonzero(g.adjacency[v])[0]
    sub = g.adjacency[np.ix_(nbrs, nbrs)].copy()
    return Graph(sub, g.features[nbrs].copy())


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = np.zeros(g.n, dtype=np.bool_)
    seen[0] = True
    frontier = np.zeros(g.n, dtype=np.bool_)
    frontier[0] = True
    while frontier.any():
        nxt = (g.adjacency[frontier].any(axis=0)) & ~seen
        seen |= nxt
        frontier = nxt
    return bool(seen.all())


# ---------------------------------------------------------------------------
# JSON serialization
#
# Schema: {"n": int, "edges": [[u, v], ...], "features": [[...], ...]}
# "features" is optional and defaults to a single constant channel of 1.0.


def graph_to_dict(g: Graph) -> dict:
    return {
        "n": g.n,
        "edges": [[u, v] for u, v in g.edges],
        "features": [list(row) for row in g.features],
    }


def graph_from_dict(doc: dict) -> Graph:
    if "n" not in doc:
        raise ParseError("missing field 'n'")
    if "edges" not in doc:
        raise ParseError("missing field 'edges'")
    try:
        return new_graph(int(doc["n"]), doc["edges"], doc.get("features"))
    except (SelfLoopRejected, InvalidEdge, ShapeMismatch) as exc:
        raise ParseError(str(exc)) from exc


def write_graph_json(path_, g: Graph) -> None:
    with open(path_, "w") as fh:
        json.dump(graph_to_dict(g), fh)


def read_graph_json(path_) -> Graph:
    with open(path_) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, col {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    return graph_from_dict(doc)
