import pytest

from subgraph_lab import verify
from subgraph_lab.errors import UnknownSuite
from subgraph_lab.report import Report


def test_unknown_suite_raises():
    with pytest.raises(UnknownSuite):
        verify.run_suite("nonsense", seed=1)


def test_equivariance_suite_detects_injected_broken_layer():
    records = verify.equivariance_suite(3, n_graphs=3, trials=3, include_broken=True)
    broken = [r for r in records if "broken_fixture" in r.name]
    assert len(broken) == 1 and broken[0].status == "FAIL"
    others = [r for r in records if "broken_fixture" not in r.name]
    assert all(r.status == "PASS" for r in others)
    report = Report("verify", {"suite": "equivariance"}, tuple(records))
    assert not report.passed


@pytest.mark.parametrize("suite", sorted(verify.SUITES))
def test_every_suite_runs_and_passes(suite):
    if suite == "gradcheck":
        records = verify.gradcheck_suite(5, n_seeds=1)
    elif suite == "equivariance":
        records = verify.equivariance_suite(5, n_graphs=3, trials=3)
    elif suite == "lemma1":
        records = verify.lemma1_suite(5, n_graphs=4)
    elif suite in ("prop5", "prop6", "thm3"):
        records = getattr(verify, f"{suite}_suite")(5, n_bags=2)
    else:
        records = verify.run_suite(suite, 5, None)
    assert records and all(r.status == "PASS" for r in records)


def test_separate_flags_unequal_sizes():
    from subgraph_lab import graphs as G
    from subgraph_lab.separate import pair_verdict

    cfg = {"policy": "NM", "layers": {"kind": "SUN", "mode": "linear", "count": 1, "width": 3},
           "pooling": {"kind": "ROOT_POOL"}, "head": {}}
    verdict = pair_verdict(G.cycle(4), G.cycle(5), cfg, 2, 1, ids=("c4", "c5"))
    assert verdict["size_mismatch"] is True
    assert verdict["wl1"] is True and verdict["fwl2"] is True
    assert verdict["pair"] == ["c4", "c5"]
