import numpy as np
import pytest

from subgraph_lab import graphs as G
from subgraph_lab import layers as L
from subgraph_lab import policy as P
from subgraph_lab.errors import BadTerm, MissingMembership, NotAllowedInIGN2, ShapeMismatch
from subgraph_lab.graphs import Permutation, apply_permutation, new_graph
from subgraph_lab.layers.model import build_model, model_forward
from subgraph_lab.layers.reign import LayerSpec, ReignTerm, ign2_layer, reign2_layer
from tests.conftest import random_attributed_graph


def test_morris_isolated_node():
    w1 = np.array([[2.0]])
    w2 = np.array([[5.0]])
    out = L.morris_layer(w1, w2, np.zeros((1, 1), dtype=bool), np.array([[3.0]]))
    assert out.tolist() == [[6.0]]


def test_morris_k2_swap():
    g = new_graph(2, [(0, 1)], [[1.0], [2.0]])
    out = L.morris_layer(np.zeros((1, 1)), np.eye(1), g.adjacency, g.features,
                         activation="identity")
    assert out.tolist() == [[2.0], [1.0]]


def test_morris_c3_all_ones():
    g = G.cycle(3)
    out = L.morris_layer(np.eye(1), np.eye(1), g.adjacency, g.features)
    assert out.tolist() == [[3.0], [3.0], [3.0]]


def test_ds_layer_identical_subgraphs_evolve_identically(rng):
    g = random_attributed_graph(rng, 5, 2)
    bag = P.apply_policy(g, P.NULL)
    out = L.ds_layer(bag, rng.normals((3, 2)), rng.normals((3, 2)))
    for k in range(1, 5):
        assert np.array_equal(out.sub_feat[k], out.sub_feat[0])


def test_dss_degenerates_to_ds(rng):
    g = random_attributed_graph(rng, 5, 2)
    bag = P.apply_policy(g, P.EGO(1))
    w1, w2 = rng.normals((3, 2)), rng.normals((3, 2))
    a = L.dss_layer(bag, w1, w2, np.zeros((3, 2)), np.zeros((3, 2)))
    b = L.ds_layer(bag, w1, w2)
    assert np.array_equal(a.sub_feat, b.sub_feat)


def test_idgnn_two_node_trace():
    g = new_graph(2, [(0, 1)], [[1.0], [2.0]])
    bag = P.apply_policy(g, P.EGOP(1))
    d = bag.d  # 2: feature + mark
    w1 = np.zeros((d, d))
    w2 = np.full((d, d), 2.0)
    w3 = np.full((d, d), 5.0)
    out = L.idgnn_layer(bag, w1, w2, w3, activation="identity")
    x_root = bag.sub_feat[0, 0]
    x_other = bag.sub_feat[0, 1]
    # in subgraph 0: the root's neighbour (node 1) gets the W3-transformed root
    # message, the root itself gets the W2-transformed message from node 1
    assert np.allclose(out.sub_feat[0, 1], w3 @ x_root)
    assert np.allclose(out.sub_feat[0, 0], w2 @ x_other)


def test_gnnak_masked_matches_bruteforce(rng):
    g = G.erdos_renyi(6, 0.4, rng.next_u64())
    bag = P.apply_policy(g, P.EGO(1))
    inner = [(rng.normals((1, 1)), rng.normals((1, 1)))]
    out = L.gnnak_block(bag, inner, ctx_variant=True, masked=True)
    inner_out = L.ds_layer(bag, inner[0][0], inner[0][1])
    x = inner_out.sub_feat
    member = bag.membership
    for k in range(6):
        for i in range(6):
            expect = (x[i, i]
                      + sum(x[j, i] for j in range(6) if member[i, j])
                      + sum(x[i, j] for j in range(6) if member[i, j]))
            assert np.allclose(out.sub_feat[k, i], expect)


def test_gnnak_masked_requires_membership(rng):
    g = random_attributed_graph(rng, 4, 1)
    bag = P.apply_policy(g, P.NULL)
    bag = P.SubgraphBag(bag.sub_adj, bag.sub_feat, None, bag.orig_adj, bag.policy)
    with pytest.raises(MissingMembership):
        L.gnnak_block(bag, [(np.eye(1), np.eye(1))], masked=True)


# ---------------------------------------------------------------------------
# 2-IGN / ReIGN(2)


def test_ign2_zero_weights_bias_constant(rng):
    grid = rng.normals((4, 4, 2))
    spec = LayerSpec("IGN2", (ReignTerm("self", "w"),), (ReignTerm("self", "w"),),
                     bias_on="b", bias_off="b", activation="identity")
    params = {"w": np.zeros((3, 2)), "b": np.array([1.0, 2.0, 3.0])}
    out = ign2_layer(spec, grid, params)
    assert np.allclose(out, np.broadcast_to([1.0, 2.0, 3.0], (4, 4, 3)))


def test_ign2_self_identity(rng):
    grid = rng.normals((5, 5, 3))
    spec = LayerSpec("IGN2", (ReignTerm("self", "w"),), (ReignTerm("self", "w"),),
                     activation="identity")
    out = ign2_layer(spec, grid, {"w": np.eye(3)})
    assert np.allclose(out, grid)


def test_ign2_transpose_term(rng):
    grid = rng.normals((5, 5, 2))
    spec = LayerSpec("IGN2", (), (ReignTerm("transpose", "w"),), activation="identity")
    out = ign2_layer(spec, grid, {"w": np.eye(2)})
    off = ~np.eye(5, dtype=bool)
    assert np.allclose(out[off], np.swapaxes(grid, 0, 1)[off])
    assert np.allclose(out[~off], 0.0)


def test_ign2_rejects_local_variants():
    spec = LayerSpec("IGN2", (ReignTerm("2.on", "w", "local_subgraph"),), ())
    with pytest.raises(NotAllowedInIGN2):
        ign2_layer(spec, np.zeros((4, 4, 1)), {"w": np.eye(1)})


def test_reign_term_validation():
    with pytest.raises(BadTerm):
        ReignTerm("2.on", "w")  # aggregated without variant
    with pytest.raises(BadTerm):
        ReignTerm("self", "w", "global")  # plain with variant
    with pytest.raises(BadTerm):
        ReignTerm("nonsense", "w")
    with pytest.raises(BadTerm):
        ReignTerm("2.on", "w", "global", agg="median")


def test_reign2_reproduces_ds(rng):
    for _ in range(10):
        g = random_attributed_graph(rng, 6, 2)
        bag = P.apply_policy(g, [P.NM, P.EGO(1), P.ND, P.NULL][rng.randint(0, 3)])
        d = bag.d
        w1, w2 = rng.normals((3, d)), rng.normals((3, d))
        spec = LayerSpec(
            "REIGN2",
            (ReignTerm("self", "w1"), ReignTerm("2.on", "w2", "local_subgraph")),
            (ReignTerm("self", "w1"), ReignTerm("3.off", "w2", "local_subgraph")),
        )
        out = reign2_layer(spec, bag, {"w1": w1, "w2": w2})
        expect = L.ds_layer(bag, w1, w2)
        assert np.allclose(out.sub_feat, expect.sub_feat, atol=1e-12)


def test_reign2_vertical_term_on_identical_subgraphs(rng):
    g = random_attributed_graph(rng, 5, 2)
    bag = P.apply_policy(g, P.NULL)  # every subgraph identical
    spec = LayerSpec("REIGN2", (), (ReignTerm("2.off", "w", "global"),), activation="identity")
    out = reign2_layer(spec, bag, {"w": np.eye(2)})
    n = 5
    off = ~np.eye(n, dtype=bool)
    expect = (n - 1) * bag.sub_feat
    assert np.allclose(out.sub_feat[off], expect[off], atol=1e-12)


def test_reign2_empty_spec_with_bias(rng):
    g = random_attributed_graph(rng, 4, 2)
    bag = P.apply_policy(g, P.NULL)
    spec = LayerSpec("REIGN2", (), (), bias_on="b", bias_off="b", activation="identity")
    out = reign2_layer(spec, bag, {"b": np.array([2.0])})
    assert np.allclose(out.sub_feat, 2.0)


def test_reign2_mean_aggregation(rng):
    g = random_attributed_graph(rng, 5, 1)
    bag = P.apply_policy(g, P.NULL)
    spec_sum = LayerSpec("REIGN2", (), (ReignTerm("6.off", "w", "global", "sum"),),
                         activation="identity")
    spec_mean = LayerSpec("REIGN2", (), (ReignTerm("6.off", "w", "global", "mean"),),
                          activation="identity")
    a = reign2_layer(spec_sum, bag, {"w": np.eye(1)})
    b = reign2_layer(spec_mean, bag, {"w": np.eye(1)})
    off = ~np.eye(5, dtype=bool)
    assert np.allclose(a.sub_feat[off], 5.0 * b.sub_feat[off], atol=1e-12)


# ---------------------------------------------------------------------------
# SUN


def test_sun_identity_map(rng):
    g = random_attributed_graph(rng, 5, 2)
    bag = P.apply_policy(g, P.EGO(1))
    z = np.zeros((2, 2))
    t1 = {"u2_r": np.eye(2), "u3_r": z, "u4_r": z, "u5_r": z, "u6_r": z}
    t2 = {"u0": z, "u1": z, "u2": np.eye(2), "u3": z, "u4": z, "u5": z, "u6": z}
    out = L.sun_layer(t1, t2, bag, mode="linear", activation="identity")
    assert np.allclose(out.sub_feat, bag.sub_feat)


def test_sun_vertical_term_counts_subgraphs(rng):
    g = random_attributed_graph(rng, 5, 2)
    bag = P.apply_policy(g, P.NULL)  # all subgraphs equal
    z = np.zeros((2, 2))
    t1 = {"u2_r": z, "u3_r": z, "u4_r": z, "u5_r": np.eye(2), "u6_r": z}
    t2 = {"u0": z, "u1": z, "u2": z, "u3": z, "u4": z, "u5": np.eye(2), "u6": z}
    out = L.sun_layer(t1, t2, bag, mode="linear", activation="identity")
    assert np.allclose(out.sub_feat, 5.0 * bag.sub_feat, atol=1e-12)


def test_sun_missing_weight_raises(rng):
    g = random_attributed_graph(rng, 4, 1)
    bag = P.apply_policy(g, P.NULL)
    with pytest.raises(ShapeMismatch):
        L.sun_layer({}, {}, bag, mode="linear")


def test_sun_degenerates_to_ds_exactly(rng):
    g = random_attributed_graph(rng, 6, 2)
    bag = P.apply_policy(g, P.EGOP(1))
    d = bag.d
    w1, w2 = rng.normals((4, d)), rng.normals((4, d))
    z = np.zeros((4, d))
    t1 = {"u2_r": w1, "u3_r": z, "u4_r": w2, "u5_r": z, "u6_r": z}
    t2 = {"u0": z, "u1": z, "u2": w1, "u3": z, "u4": w2, "u5": z, "u6": z}
    a = L.sun_layer(t1, t2, bag, mode="linear")
    b = L.ds_layer(bag, w1, w2)
    assert np.array_equal(a.sub_feat, b.sub_feat)


# ---------------------------------------------------------------------------
# models


def test_model_zero_layers_root_pool_sums_marked_features(rng):
    g = random_attributed_graph(rng, 5, 1)
    cfg = {"policy": "NM", "layers": {"count": 0}, "pooling": {"kind": "ROOT_POOL"}, "head": {}}
    model = build_model(cfg, g.d, seed=1)
    out = model_forward(model, g)
    expect = np.concatenate([g.features.sum(axis=0), [5.0]])
    assert np.allclose(out, expect)


def test_model_forward_invariance(rng):
    cfg = {"policy": "EGO+:2", "layers": {"kind": "SUN", "mode": "linear", "count": 2, "width": 6},
           "pooling": {"kind": "ROOT_POOL"}, "head": {"hidden": 6, "out": 2}}
    for s in range(20):
        g = G.erdos_renyi(7, 0.4, rng.next_u64())
        model = build_model(cfg, g.d, seed=100 + s)
        e1 = model_forward(model, g)
        sigma = Permutation.random(7, rng)
        e2 = model_forward(model, apply_permutation(g, sigma))
        assert np.max(np.abs(e1 - e2)) < 1e-9


def test_ds_assembly_matches_degenerate_dss(rng):
    g = random_attributed_graph(rng, 5, 1)
    cfg_ds = {"policy": "ND", "layers": {"kind": "DS", "count": 1, "width": 4},
              "pooling": {"kind": "SUBGRAPH_READOUT_DEEPSETS", "member_masked": True}, "head": {}}
    model = build_model(cfg_ds, g.d, seed=3)
    params = dict(model.params)
    cfg_dss = dict(cfg_ds)
    cfg_dss["layers"] = {"kind": "DSS", "count": 1, "width": 4}
    model_dss = build_model(cfg_dss, g.d, seed=3)
    p2 = dict(model_dss.params)
    p2["layer0.w1_sub"] = params["layer0.w1"]
    p2["layer0.w2_sub"] = params["layer0.w2"]
    p2["layer0.w1_cross"] = np.zeros_like(params["layer0.w1"])
    p2["layer0.w2_cross"] = np.zeros_like(params["layer0.w2"])
    out_ds = model_forward(model, g)
    out_dss = model_forward(model_dss.with_params(p2), g)
    assert np.allclose(out_ds, out_dss, atol=1e-12)


def test_ngnn_outer_pooling_matches_manual(rng):
    g = random_attributed_graph(rng, 5, 1)
    cfg = {"policy": "EGO:1", "layers": {"kind": "DS", "count": 1, "width": 3},
           "pooling": {"kind": "NGNN_OUTER", "member_masked": True, "outer_layers": 1},
           "head": {}}
    model = build_model(cfg, g.d, seed=5)
    out = model_forward(model, g)
    bag = P.apply_policy(g, model.policy)
    inner = L.ds_layer(bag, model.params["layer0.w1"], model.params["layer0.w2"])
    v = np.stack([
        sum(inner.sub_feat[i, j] for j in range(g.n) if bag.membership[i, j])
        for i in range(g.n)
    ])
    v = L.morris_layer(model.params["outer0.w1"], model.params["outer0.w2"], g.adjacency, v)
    assert np.allclose(out, v.sum(axis=0), atol=1e-10)


def test_model_rejects_wrong_feature_width(rng):
    cfg = {"policy": "NM", "layers": {"kind": "SUN", "mode": "linear", "count": 1, "width": 4},
           "pooling": {"kind": "ROOT_POOL"}, "head": {}}
    model = build_model(cfg, 1, seed=1)
    g = random_attributed_graph(rng, 5, 3)
    with pytest.raises(ShapeMismatch):
        model_forward(model, g)
