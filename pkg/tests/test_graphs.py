import json

import numpy as np
import pytest

from subgraph_lab import graphs as G
from subgraph_lab.errors import (
    InvalidEdge,
    InvalidProbability,
    ParseError,
    SelfLoopRejected,
    ShapeMismatch,
    TooSmall,
)
from subgraph_lab.graphs import Permutation, apply_permutation, new_graph


def test_new_graph_single_edge():
    g = new_graph(2, [(0, 1)], [[1.0], [2.0]])
    assert g.adjacency.tolist() == [[False, True], [True, False]]
    assert g.features.tolist() == [[1.0], [2.0]]


def test_new_graph_isolated_node():
    g = new_graph(1, [], [[0.0]])
    assert g.n == 1 and not g.adjacency.any()


def test_new_graph_rejects_self_loop():
    with pytest.raises(SelfLoopRejected):
        new_graph(3, [(0, 0)])


def test_new_graph_rejects_out_of_range():
    with pytest.raises(InvalidEdge):
        new_graph(3, [(0, 3)])


def test_new_graph_rejects_bad_feature_rows():
    with pytest.raises(ShapeMismatch):
        new_graph(3, [(0, 1)], [[1.0], [2.0]])


def test_apply_permutation_identity():
    g = G.cycle(5)
    assert apply_permutation(g, Permutation.identity(5)) == g


def test_apply_permutation_reverses_path():
    g = G.path(3)
    rev = apply_permutation(g, Permutation(np.array([2, 1, 0])))
    assert sorted(rev.edges) == sorted(g.edges)
    assert rev == g  # path 2-1-0 has the same unordered edge set


def test_apply_permutation_complete_invariant(rng):
    g = G.complete(3)
    for _ in range(5):
        assert apply_permutation(g, Permutation.random(3, rng)) == g


def test_apply_permutation_moves_features():
    g = new_graph(2, [(0, 1)], [[1.0], [2.0]])
    out = apply_permutation(g, Permutation(np.array([1, 0])))
    assert out.features.tolist() == [[2.0], [1.0]]


def test_permutation_group_action(rng):
    from tests.conftest import random_attributed_graph

    for _ in range(10):
        g = random_attributed_graph(rng, 6, 2)
        sigma = Permutation.random(6, rng)
        tau = Permutation.random(6, rng)
        lhs = apply_permutation(apply_permutation(g, sigma), tau)
        rhs = apply_permutation(g, tau.compose(sigma))
        assert lhs == rhs


def test_permutation_size_mismatch():
    with pytest.raises(ShapeMismatch):
        apply_permutation(G.cycle(4), Permutation.identity(5))


def test_erdos_renyi_extremes():
    assert not G.erdos_renyi(5, 0.0, 1).adjacency.any()
    assert G.erdos_renyi(5, 1.0, 1) == G.complete(5)
    with pytest.raises(InvalidProbability):
        G.erdos_renyi(5, 1.5, 1)


def test_erdos_renyi_deterministic():
    assert G.erdos_renyi(10, 0.3, 7) == G.erdos_renyi(10, 0.3, 7)
    assert G.erdos_renyi(12, 0.4, 7) != G.erdos_renyi(12, 0.4, 8)


def test_generators():
    assert G.cycle(3) == G.complete(3)
    with pytest.raises(TooSmall):
        G.cycle(2)
    two_triangles = G.disjoint_union(G.cycle(3), G.cycle(3))
    assert two_triangles.n == 6
    assert (two_triangles.adjacency.sum(axis=1) == 2).all()
    s = G.star(3)
    assert sorted(s.adjacency.sum(axis=1).tolist()) == [1, 1, 1, 3]
    with pytest.raises(TooSmall):
        G.star(0)


def test_rook_degree_six():
    degs = G.rook_4x4().adjacency.sum(axis=1)
    assert (degs == 6).all()


@pytest.mark.parametrize("builder", [G.rook_4x4, G.shrikhande])
def test_srg_parameters(builder):
    assert G.srg_parameters(builder()) == (16, 6, 2, 2)


def test_rook_shrikhande_not_isomorphic_via_neighborhoods():
    # rook neighborhoods split into two triangles; Shrikhande's are 6-cycles
    rook_nb = G.neighborhood_subgraph(G.rook_4x4(), 0)
    shri_nb = G.neighborhood_subgraph(G.shrikhande(), 0)
    assert not G.is_connected(rook_nb)
    assert G.is_connected(shri_nb)
    for v in range(16):
        assert not G.is_connected(G.neighborhood_subgraph(G.rook_4x4(), v))
        nb = G.neighborhood_subgraph(G.shrikhande(), v)
        assert G.is_connected(nb) and (nb.adjacency.sum(axis=1) == 2).all()


def test_graph_json_round_trip(tmp_path):
    g = G.complete(3)
    path = tmp_path / "k3.json"
    G.write_graph_json(path, g)
    assert G.read_graph_json(path) == g


def test_graph_json_rejects_self_loop(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "edges": [[0, 0]]}))
    with pytest.raises(ParseError):
        G.read_graph_json(path)


def test_graph_json_missing_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"edges": []}))
    with pytest.raises(ParseError, match="'n'"):
        G.read_graph_json(path)


def test_graph_json_malformed_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2,\n  "edges": [[0 1]]}')
    with pytest.raises(ParseError, match="line 2"):
        G.read_graph_json(path)


def test_graph_json_default_features(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 2, "edges": [[0, 1]]}))
    g = G.read_graph_json(path)
    assert g.features.tolist() == [[1.0], [1.0]]
