import numpy as np
import pytest

from subgraph_lab import graphs as G
from subgraph_lab import wl
from subgraph_lab.graphs import Permutation, apply_permutation
from tests.conftest import petersen


def test_k3_single_color_class():
    col = wl.wl1_stable_coloring(G.complete(3))
    assert len(set(col.colors.tolist())) == 1


def test_star_two_classes():
    col = wl.wl1_stable_coloring(G.star(3))
    classes = [col.colors[0]] + [col.colors[i] for i in range(1, 4)]
    assert len(set(col.colors.tolist())) == 2
    assert len(set(classes[1:])) == 1 and classes[0] != classes[1]


def test_path4_two_classes():
    col = wl.wl1_stable_coloring(G.path(4))
    assert col.colors[0] == col.colors[3]
    assert col.colors[1] == col.colors[2]
    assert col.colors[0] != col.colors[1]


def test_wl1_c6_vs_two_triangles_indistinguishable():
    c6 = G.cycle(6)
    cc = G.disjoint_union(G.cycle(3), G.cycle(3))
    assert wl.wl1_distinguish(c6, cc) is False
    assert wl.fwl2_distinguish(c6, cc) is True


def test_wl1_degree_histograms():
    assert wl.wl1_distinguish(G.complete(3), G.path(3)) is True


def test_fwl2_rook_vs_shrikhande_equivalent():
    assert wl.fwl2_distinguish(G.rook_4x4(), G.shrikhande()) is False
    assert wl.wl1_distinguish(G.rook_4x4(), G.shrikhande()) is False


def test_wl1_isomorphism_invariance(rng):
    for _ in range(10):
        g = G.erdos_renyi(rng.randint(4, 9), 0.4, rng.next_u64())
        sigma = Permutation.random(g.n, rng)
        assert wl.wl1_distinguish(g, apply_permutation(g, sigma)) is False
        assert wl.fwl2_distinguish(g, apply_permutation(g, sigma)) is False


def test_wl1_symmetry(rng):
    for _ in range(10):
        g1 = G.erdos_renyi(6, 0.4, rng.next_u64())
        g2 = G.erdos_renyi(6, 0.4, rng.next_u64())
        assert wl.wl1_distinguish(g1, g2) == wl.wl1_distinguish(g2, g1)


def test_fwl2_refines_wl1_on_corpus(rng):
    corpus = [
        (G.cycle(6), G.disjoint_union(G.cycle(3), G.cycle(3))),
        (G.rook_4x4(), G.shrikhande()),
        (G.complete(3), G.path(3)),
        (G.star(3), G.path(4)),
        (petersen(), G.cycle(10)),
    ]
    for _ in range(15):
        corpus.append((G.erdos_renyi(7, 0.4, rng.next_u64()),
                       G.erdos_renyi(7, 0.4, rng.next_u64())))
    for g1, g2 in corpus:
        if wl.wl1_distinguish(g1, g2):
            assert wl.fwl2_distinguish(g1, g2)


def test_different_sizes_trivially_distinguished():
    assert wl.wl1_distinguish(G.cycle(4), G.cycle(5)) is True
    assert wl.fwl2_distinguish(G.cycle(4), G.cycle(5)) is True


def test_determinism():
    c6 = G.cycle(6)
    a = wl.wl1_stable_coloring(c6)
    b = wl.wl1_stable_coloring(c6)
    assert np.array_equal(a.colors, b.colors) and a.rounds == b.rounds
    p = petersen()
    a = wl.fwl2_stable_coloring(p)
    b = wl.fwl2_stable_coloring(p)
    assert np.array_equal(a.colors, b.colors)


def test_fwl2_fallback_matches_njit(rng):
    from subgraph_lab import _kernels as K

    if not K.HAS_NUMBA:
        pytest.skip("numba disabled")
    colors = rng.normals((6, 6))
    colors = np.argsort(colors.reshape(-1)).reshape(6, 6).astype(np.int64) % 7
    assert np.array_equal(K._fwl2_signatures_py(colors, 7), K._fwl2_signatures_njit(colors, 7))
