import numpy as np
import pytest

from subgraph_lab import graphs as G
from subgraph_lab.counting import PATTERN_SIZE, PATTERNS, count_substructure
from subgraph_lab.graphs import Permutation, apply_permutation
from tests.conftest import petersen


def test_triangle_on_k3():
    assert count_substructure(G.complete(3), "triangle", "graph") == 1


def test_cycle4_on_c4():
    assert count_substructure(G.cycle(4), "cycle4", "graph") == 1


def test_petersen_has_girth_five():
    p = petersen()
    assert count_substructure(p, "triangle", "graph") == 0
    assert count_substructure(p, "cycle4", "graph") == 0


def test_star_counts():
    assert count_substructure(G.star(3), "star3", "graph") == 1
    assert count_substructure(G.star(4), "star3", "graph") == 4  # C(4, 3)


def test_tailed_triangle_simple():
    # triangle 0-1-2 plus pendant 3 attached to 0
    g = G.new_graph(4, [(0, 1), (1, 2), (0, 2), (0, 3)])
    assert count_substructure(g, "tailed_triangle", "graph") == 1
    assert count_substructure(g, "triangle", "graph") == 1


# independent closed-form oracles ------------------------------------------------


def _formula_counts(g):
    a = g.adjacency.astype(np.int64)
    deg = a.sum(axis=1)
    m = int(a.sum()) // 2
    tri = int(np.trace(a @ a @ a)) // 6
    star3 = int(sum(d * (d - 1) * (d - 2) // 6 for d in deg))
    # tailed triangles: per triangle, each corner contributes deg - 2 pendant edges
    tailed = 0
    n = g.n
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if a[i, j] and a[j, k] and a[i, k]:
                    tailed += (deg[i] - 2) + (deg[j] - 2) + (deg[k] - 2)
    a4 = np.trace(np.linalg.matrix_power(a, 4))
    c4 = (int(a4) - 2 * m - int(sum(d * (d - 1) for d in deg)) * 2) // 8
    return {"triangle": tri, "star3": star3, "tailed_triangle": tailed, "cycle4": c4}


@pytest.mark.parametrize("pattern", PATTERNS)
def test_counts_match_closed_form(pattern, rng):
    for _ in range(15):
        g = G.erdos_renyi(rng.randint(5, 11), 0.45, rng.next_u64())
        assert count_substructure(g, pattern, "graph") == _formula_counts(g)[pattern]


@pytest.mark.parametrize("pattern", PATTERNS)
def test_per_node_attribution(pattern, rng):
    for _ in range(10):
        g = G.erdos_renyi(rng.randint(5, 10), 0.5, rng.next_u64())
        per_node = count_substructure(g, pattern, "per_node")
        total = count_substructure(g, pattern, "graph")
        assert per_node.sum() == total * PATTERN_SIZE[pattern]
        # equivariance of the attribution
        sigma = Permutation.random(g.n, rng)
        permuted = count_substructure(apply_permutation(g, sigma), pattern, "per_node")
        assert np.array_equal(permuted[sigma.mapping], per_node)


def test_fallback_matches_njit(rng):
    from subgraph_lab import _kernels as K

    if not K.HAS_NUMBA:
        pytest.skip("numba disabled")
    for _ in range(5):
        g = G.erdos_renyi(9, 0.5, rng.next_u64())
        adj = np.ascontiguousarray(g.adjacency)
        assert np.array_equal(K._triangle_counts_py(adj), K._triangle_counts_njit(adj))
        assert np.array_equal(K._star3_counts_py(adj), K._star3_counts_njit(adj))
        assert np.array_equal(K._tailed_triangle_counts_py(adj), K._tailed_triangle_counts_njit(adj))
        assert np.array_equal(K._cycle4_counts_py(adj), K._cycle4_counts_njit(adj))
