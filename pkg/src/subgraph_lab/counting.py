"""Brute-force substructure counting oracles (triangle, tailed triangle, 3-star, 4-cycle).

Counts are (non-induced) subgraph-isomorphism counts obtained by exhaustive
enumeration of node tuples.  Per-node attribution: every node of a pattern
instance is incremented once per instance, so the graph-level count equals the
node sum divided by the pattern size.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import SubgraphLabError
from .graphs import Graph

PATTERNS = ("triangle", "tailed_triangle", "star3", "cycle4")

PATTERN_SIZE = {
    "triangle": 3,
    "tailed_triangle": 4,
    "star3": 4,
    "cycle4": 4,
}

_KERNELS = {
    "triangle": lambda adj: _kernels.triangle_counts(adj),
    "tailed_triangle": lambda adj: _kernels.tailed_triangle_counts(adj),
    "star3": lambda adj: _kernels.star3_counts(adj),
    "cycle4": lambda adj: _kernels.cycle4_counts(adj),
}


def count_substructure(g: Graph, pattern: str, mode: str = "graph"):
    """Exact pattern count, either a graph total or the per-node attribution vector."""
    if pattern not in PATTERNS:
        raise SubgraphLabError(f"unsupported pattern {pattern!r}")
    per_node = _KERNELS[pattern](np.ascontiguousarray(g.adjacency))
    if mode == "per_node":
        return per_node
    if mode == "graph":
        total = int(per_node.sum())
        size = PATTERN_SIZE[pattern]
        assert total % size == 0
        return total // size
    raise SubgraphLabError(f"unknown mode {mode!r}")
