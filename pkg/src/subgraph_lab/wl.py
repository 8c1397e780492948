"""Weisfeiler-Leman oracles: 1-WL color refinement and folklore 2-WL.

Colors are dense integers assigned through exact signature compression (the
joint rows of both graphs are lexicographically sorted and deduplicated), so
there are no hash collisions and results from the two graphs are directly
comparable.  FWL-2 refines pairs (u, v) with the multiset of (c(u,w), c(w,v))
over all w, run per graph but with the shared color dictionary; its separation
power equals the 3-WL test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graphs import Graph


@dataclass(frozen=True)
class Coloring:
    domain: str  # "nodes" | "node-pairs"
    colors: np.ndarray  # per element; node-pairs flattened row-major (n, n)
    rounds: int
    stable: bool


def _compress_rows(rows: list[np.ndarray]) -> list[np.ndarray]:
    """Dense ids for the concatenated signature rows of several graphs."""
    joint = np.concatenate(rows, axis=0)
    _, inverse = np.unique(joint, axis=0, return_inverse=True)
    out = []
    offset = 0
    for r in rows:
        out.append(inverse[offset: offset + len(r)].astype(np.int64))
        offset += len(r)
    return out


def _wl1_signatures(adj: np.ndarray, colors: np.ndarray) -> np.ndarray:
    """Row per node: own color, then the sorted neighbour colors padded with -1."""
    n = adj.shape[0]
    sig = np.full((n, n + 1), -1, dtype=np.int64)
    sig[:, 0] = colors
    for v in range(n):
        nbrs = np.sort(colors[adj[v]])
        sig[v, 1: 1 + len(nbrs)] = nbrs
    return sig


def _wl1_refine(graphs_: list[Graph]) -> tuple[list[np.ndarray], int]:
    colors = [np.zeros(g.n, dtype=np.int64) for g in graphs_]
    num = 1
    rounds = 0
    max_rounds = max((g.n for g in graphs_), default=0)
    while rounds < max_rounds:
        sigs = [_wl1_signatures(g.adjacency, c) for g, c in zip(graphs_, colors)]
        new_colors = _compress_rows(sigs)
        new_num = int(max((c.max(initial=-1) for c in new_colors), default=-1)) + 1
        rounds += 1
        colors = new_colors
        if new_num == num:
            return colors, rounds
        num = new_num
    return colors, rounds


def wl1_stable_coloring(g: Graph) -> Coloring:
    colors, rounds = _wl1_refine([g])
    return Coloring("nodes", colors[0], rounds, stable=True)


def wl1_joint_colorings(g1: Graph, g2: Graph) -> tuple[Coloring, Coloring]:
    colors, rounds = _wl1_refine([g1, g2])
    return (Coloring("nodes", colors[0], rounds, True),
            Coloring("nodes", colors[1], rounds, True))


def _histograms_differ(c1: np.ndarray, c2: np.ndarray) -> bool:
    return not np.array_equal(np.sort(c1), np.sort(c2))


def wl1_distinguish(g1: Graph, g2: Graph) -> bool:
    """True iff stable 1-WL color histograms differ."""
    if g1.n != g2.n:
        return True
    colors, _ = _wl1_refine([g1, g2])
    return _histograms_differ(colors[0], colors[1])


def _fwl2_initial(g: Graph) -> np.ndarray:
    """Pair types: 0 non-edge, 1 edge, 2 diagonal."""
    init = g.adjacency.astype(np.int64)
    np.fill_diagonal(init, 2)
    return init


def _fwl2_refine(graphs_: list[Graph]) -> tuple[list[np.ndarray], int]:
    colors = [_fwl2_initial(g) for g in graphs_]
    flat = _compress_rows([c.reshape(-1, 1) for c in colors])
    colors = [f.reshape(g.n, g.n) for f, g in zip(flat, graphs_)]
    num = int(max((c.max(initial=-1) for c in colors), default=-1)) + 1
    rounds = 0
    max_rounds = max((g.n * g.n for g in graphs_), default=0)
    while rounds < max_rounds:
        sigs = []
        for g, c in zip(graphs_, colors):
            codes = _kernels.fwl2_signatures(np.ascontiguousarray(c), num)  # (n*n, n)
            own = c.reshape(-1, 1)
            sigs.append(np.concatenate([own, codes], axis=1))
        flat = _compress_rows(sigs)
        new_colors = [f.reshape(g.n, g.n) for f, g in zip(flat, graphs_)]
        new_num = int(max((c.max(initial=-1) for c in new_colors), default=-1)) + 1
        rounds += 1
        colors = new_colors
        if new_num == num:
            return colors, rounds
        num = new_num
    return colors, rounds


def fwl2_stable_coloring(g: Graph) -> Coloring:
    colors, rounds = _fwl2_refine([g])
    return Coloring("node-pairs", colors[0].reshape(-1), rounds, stable=True)


def fwl2_distinguish(g1: Graph, g2: Graph) -> bool:
    """Folklore 2-WL (separation power of 3-WL) on the pair, shared dictionary."""
    if g1.n != g2.n:
        return True
    colors, _ = _fwl2_refine([g1, g2])
    return _histograms_differ(colors[0].reshape(-1), colors[1].reshape(-1))
