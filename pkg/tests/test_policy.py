import numpy as np
import pytest

from subgraph_lab import graphs as G
from subgraph_lab import policy as P
from subgraph_lab.errors import DegenerateBag, InvalidNode, ShapeMismatch, UnsupportedPolicy
from subgraph_lab.graphs import Permutation, apply_permutation, new_graph
from tests.conftest import random_attributed_graph

ALL_KINDS = [P.ND, P.NM, P.NULL, P.EGO(1), P.EGO(2), P.EGO(3), P.EGOP(1), P.EGOP(2)]


def test_policy_kind_serialization():
    for kind in ALL_KINDS:
        assert P.PolicyKind.parse(kind.serialize()) == kind
    with pytest.raises(UnsupportedPolicy):
        P.PolicyKind.parse("EGO")
    with pytest.raises(UnsupportedPolicy):
        P.PolicyKind("EGO", 0)


def test_nm_marks_only_roots():
    g = new_graph(2, [(0, 1)], [[1.0], [2.0]])
    bag = P.apply_policy(g, P.NM)
    assert bag.sub_feat[0].tolist() == [[1.0, 1.0], [2.0, 0.0]]
    assert bag.sub_feat[1].tolist() == [[1.0, 0.0], [2.0, 1.0]]


def test_nd_on_k3_deletes_root_edges():
    bag = P.apply_policy(G.complete(3), P.ND)
    expect = np.zeros((3, 3), dtype=bool)
    expect[1, 2] = expect[2, 1] = True
    assert np.array_equal(bag.sub_adj[0], expect)
    assert not bag.membership[0][0] and bag.membership[0][1]


def test_nd_needs_two_nodes():
    with pytest.raises(DegenerateBag):
        P.apply_policy(new_graph(1, []), P.ND)


def test_ego1_on_path():
    bag = P.apply_policy(G.path(3), P.EGO(1))
    assert set(np.nonzero(bag.membership[0])[0]) == {0, 1}
    sub0 = bag.sub_adj[0]
    assert sub0[0, 1] and sub0[1, 0] and not sub0[1, 2]
    sub1 = bag.sub_adj[1]
    assert sub1[0, 1] and sub1[1, 2]


def test_ego_ball():
    c6 = G.cycle(6)
    assert P.ego_ball(c6, 0, 1) == {0, 1, 5}
    assert P.ego_ball(c6, 0, 3) == set(range(6))
    assert P.ego_ball(c6, 2, 0) == {2}
    with pytest.raises(InvalidNode):
        P.ego_ball(c6, 6, 1)


def test_ego_membership_matches_ball(rng):
    for _ in range(10):
        g = G.erdos_renyi(rng.randint(4, 9), 0.35, rng.next_u64())
        for h in (1, 2):
            bag = P.apply_policy(g, P.EGO(h))
            for i in range(g.n):
                assert set(np.nonzero(bag.membership[i])[0]) == P.ego_ball(g, i, h)


def test_null_policy_replicates_graph():
    g = G.cycle(4)
    bag = P.apply_policy(g, P.NULL)
    assert all(np.array_equal(bag.sub_adj[i], g.adjacency) for i in range(4))
    assert bag.membership.all()


def test_bag_permutation_identity():
    bag = P.apply_policy(G.cycle(4), P.NM)
    assert P.bag_apply_permutation(bag, Permutation.identity(4)) == bag


def test_bag_permutation_size_mismatch():
    bag = P.apply_policy(G.cycle(4), P.NM)
    with pytest.raises(ShapeMismatch):
        P.bag_apply_permutation(bag, Permutation.identity(5))


def test_nm_transposition_keeps_mark_on_diagonal():
    g = new_graph(2, [(0, 1)], [[1.0], [2.0]])
    bag = P.bag_apply_permutation(P.apply_policy(g, P.NM), Permutation(np.array([1, 0])))
    assert bag.sub_feat[0, 0].tolist() == [2.0, 1.0]
    assert bag.sub_feat[1, 1].tolist() == [1.0, 1.0]
    assert bag.sub_feat[0, 1, 1] == 0.0


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_policy_equivariance_bit_exact(kind, rng):
    for _ in range(8):
        g = random_attributed_graph(rng, rng.randint(4, 8), 2)
        sigma = Permutation.random(g.n, rng)
        lhs = P.apply_policy(apply_permutation(g, sigma), kind)
        rhs = P.bag_apply_permutation(P.apply_policy(g, kind), sigma)
        assert lhs == rhs


def test_subgraph_adjacency_invariants(rng):
    for kind in ALL_KINDS:
        g = random_attributed_graph(rng, 7, 1)
        bag = P.apply_policy(g, kind)
        for i in range(g.n):
            assert np.array_equal(bag.sub_adj[i], bag.sub_adj[i].T)
            assert not bag.sub_adj[i].diagonal().any()
        if kind.marks_root:
            mark = bag.sub_feat[:, :, -1]
            assert np.array_equal(mark, np.eye(g.n))
