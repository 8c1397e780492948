"""Hot enumeration kernels: numba @njit versions with pure-Python/numpy fallbacks.

Set ``SUBGRAPH_LAB_NO_NUMBA=1`` to force the fallback path.  Both families are
importable directly (``*_njit`` / ``*_py``) so the benchmark can compare them;
everything else should go through the dispatching names.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("SUBGRAPH_LAB_NO_NUMBA", "") not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("numba disabled by SUBGRAPH_LAB_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def deco(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return deco


# ---------------------------------------------------------------------------
# per-node substructure counts (exhaustive enumeration)


def _triangle_counts_py(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            if not adj[i, j]:
                continue
            for k in range(j + 1, n):
                if adj[j, k] and adj[i, k]:
                    counts[i] += 1
                    counts[j] += 1
                    counts[k] += 1
    return counts


def _star3_counts_py(adj: np.ndarray) -> np.ndarray:
    # K_{1,3} instances: center v plus an unordered triple of its neighbors.
    n = adj.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    for v in range(n):
        nbrs = [w for w in range(n) if adj[v, w]]
        m = len(nbrs)
        for a in range(m):
            for b in range(a + 1, m):
                for c in range(b + 1, m):
                    counts[v] += 1
                    counts[nbrs[a]] += 1
                    counts[nbrs[b]] += 1
                    counts[nbrs[c]] += 1
    return counts


def _tailed_triangle_counts_py(adj: np.ndarray) -> np.ndarray:
    # triangle {a,b,c} plus a pendant edge (t, d), t in the triangle, d outside it
    n = adj.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            if not adj[a, b]:
                continue
            for c in range(b + 1, n):
                if not (adj[b, c] and adj[a, c]):
                    continue
                for t in (a, b, c):
                    for d in range(n):
                        if d in (a, b, c) or not adj[t, d]:
                            continue
                        counts[a] += 1
                        counts[b] += 1
                        counts[c] += 1
                        counts[d] += 1
    return counts


def _cycle4_counts_py(adj: np.ndarray) -> np.ndarray:
    # the three possible 4-cycles on each unordered 4-set of nodes
    n = adj.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                for d in range(c + 1, n):
                    hits = 0
                    if adj[a, b] and adj[b, c] and adj[c, d] and adj[d, a]:
                        hits += 1
                    if adj[a, b] and adj[b, d] and adj[d, c] and adj[c, a]:
                        hits += 1
                    if adj[a, c] and adj[c, b] and adj[b, d] and adj[d, a]:
                        hits += 1
                    if hits:
                        counts[a] += hits
                        counts[b] += hits
                        counts[c] += hits
                        counts[d] += hits
    return counts


# ---------------------------------------------------------------------------
# FWL-2 signature construction
#
# Given the pair coloring C (n x n int64) and the number of colors K, build the
# per-pair refinement signature: sorted multiset over w of the code
# C[u, w] * K + C[w, v].  Returned as an (n*n, n) int64 array in row-major
# (u, v) order; the caller prepends the pair's own color and compresses rows.


def _fwl2_signatures_py(colors: np.ndarray, num_colors: int) -> np.ndarray:
    n = colors.shape[0]
    k = np.int64(num_colors)
    codes = colors[:, None, :] * k + colors.T[None, :, :]  # [u, v, w]
    codes = np.sort(codes, axis=2)
    return codes.reshape(n * n, n)


@njit(cache=True)
def _fwl2_signatures_njit(colors: np.ndarray, num_colors: int) -> np.ndarray:  # pragma: no cover
    n = colors.shape[0]
    out = np.empty((n * n, n), dtype=np.int64)
    for u in range(n):
        for v in range(n):
            row = out[u * n + v]
            for w in range(n):
                row[w] = colors[u, w] * num_colors + colors[w, v]
            row.sort()
    return out


if HAS_NUMBA:
    _triangle_counts_njit = njit(cache=True)(_triangle_counts_py)
    _cycle4_counts_njit = njit(cache=True)(_cycle4_counts_py)

    @njit(cache=True)
    def _star3_counts_njit(adj: np.ndarray) -> np.ndarray:  # pragma: no cover
        n = adj.shape[0]
        counts = np.zeros(n, dtype=np.int64)
        nbrs = np.empty(n, dtype=np.int64)
        for v in range(n):
            m = 0
            for w in range(n):
                if adj[v, w]:
                    nbrs[m] = w
                    m += 1
            for a in range(m):
                for b in range(a + 1, m):
                    for c in range(b + 1, m):
                        counts[v] += 1
                        counts[nbrs[a]] += 1
                        counts[nbrs[b]] += 1
                        counts[nbrs[c]] += 1
        return counts

    @njit(cache=True)
    def _tailed_triangle_counts_njit(adj: np.ndarray) -> np.ndarray:  # pragma: no cover
        n = adj.shape[0]
        counts = np.zeros(n, dtype=np.int64)
        for a in range(n):
            for b in range(a + 1, n):
                if not adj[a, b]:
                    continue
                for c in range(b + 1, n):
                    if not (adj[b, c] and adj[a, c]):
                        continue
                    for ti in range(3):
                        t = a
                        if ti == 1:
                            t = b
                        elif ti == 2:
                            t = c
                        for d in range(n):
                            if d == a or d == b or d == c or not adj[t, d]:
                                continue
                            counts[a] += 1
                            counts[b] += 1
                            counts[c] += 1
                            counts[d] += 1
        return counts

    triangle_counts = _triangle_counts_njit
    star3_counts = _star3_counts_njit
    tailed_triangle_counts = _tailed_triangle_counts_njit
    cycle4_counts = _cycle4_counts_njit
    fwl2_signatures = _fwl2_signatures_njit
else:
    triangle_counts = _triangle_counts_py
    star3_counts = _star3_counts_py
    tailed_triangle_counts = _tailed_triangle_counts_py
    cycle4_counts = _cycle4_counts_py
    fwl2_signatures = _fwl2_signatures_py
