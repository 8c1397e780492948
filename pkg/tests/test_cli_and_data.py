import json

import numpy as np
import pytest

from subgraph_lab.cli import main
from subgraph_lab.counting import count_substructure
from subgraph_lab.datasets import generate_counting_dataset, load_split
from subgraph_lab.errors import NoInput
from subgraph_lab.report import Report, check, merge_reports
from subgraph_lab.train import train_counting

MODEL_CFG = {
    "policy": "EGO+:1",
    "layers": {"kind": "SUN", "mode": "expressive", "count": 1, "width": 4},
    "pooling": {"kind": "ROOT_POOL"},
    "head": {"hidden": 4, "out": 1},
    "aggregators": {"readout": "mean", "vertical": "mean"},
}


def test_dataset_counts_match_oracle(tmp_path):
    meta = generate_counting_dataset(30, 5, 8, 0.4, ["triangle"], seed=5, out_dir=tmp_path)
    graphs_, ys = load_split(tmp_path, "train")
    norm = meta["normalizer"][0]
    for g, y in zip(graphs_, ys):
        assert y[0] * norm == pytest.approx(count_substructure(g, "triangle", "graph"))


def test_dataset_p_zero_all_targets_zero(tmp_path):
    generate_counting_dataset(20, 5, 6, 0.0, ["triangle", "cycle4"], seed=1, out_dir=tmp_path)
    for split in ("train", "val", "test"):
        _, ys = load_split(tmp_path, split)
        assert (ys == 0).all()


def test_dataset_deterministic_bytes(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    generate_counting_dataset(25, 5, 7, 0.3, ["triangle"], seed=9, out_dir=d1)
    generate_counting_dataset(25, 5, 7, 0.3, ["triangle"], seed=9, out_dir=d2)
    for name in ("train.jsonl", "val.jsonl", "test.jsonl", "meta.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_dataset_split_sizes(tmp_path):
    meta = generate_counting_dataset(50, 5, 6, 0.3, ["triangle"], seed=2, out_dir=tmp_path)
    assert meta["sizes"] == {"train": 40, "val": 5, "test": 5}


def test_report_merging(tmp_path):
    r1 = Report("verify", {}, (check("a", 0.0, 1.0),))
    r2 = Report("verify", {}, (check("b", 2.0, 1.0),))
    p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
    r1.dump(p1)
    r2.dump(p2)
    merged = merge_reports([p1, p1])
    assert merged.passed
    merged = merge_reports([p1, p2])
    assert not merged.passed
    with pytest.raises(NoInput):
        merge_reports([])


def test_report_payload_excludes_wallclock():
    r1 = Report("verify", {"seed": 1}, (check("a", 0.0, 1.0),), wall_clock_s=1.0)
    r2 = Report("verify", {"seed": 1}, (check("a", 0.0, 1.0),), wall_clock_s=9.9)
    assert r1.payload() == r2.payload()
    assert r1.to_json() != r2.to_json()


def test_cli_verify_and_report(tmp_path, capsys):
    out = tmp_path / "basis.json"
    code = main(["verify", "--suite", "basis2ign", "--seed", "3", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["pass"] and doc["command"] == "verify"
    assert main(["report", str(out)]) == 0


def test_cli_unknown_suite_is_usage_error(tmp_path):
    assert main(["verify", "--suite", "nonsense", "--seed", "1"]) == 2


def test_cli_report_failing_input(tmp_path):
    rep = Report("verify", {}, (check("x", 5.0, 1.0),))
    path = tmp_path / "fail.json"
    rep.dump(path)
    assert main(["report", str(path)]) == 1


def test_cli_gen_and_train_smoke(tmp_path):
    data = tmp_path / "data"
    code = main(["gen-counting", "--n-graphs", "30", "--n-min", "5", "--n-max", "7",
                 "--p", "0.3", "--patterns", "triangle", "--seed", "4", "--out", str(data)])
    assert code == 0
    cfg = tmp_path / "model.json"
    cfg.write_text(json.dumps(MODEL_CFG))
    out = tmp_path / "train.json"
    ckpt = tmp_path / "ckpt.json"
    code = main(["train", "--data", str(data), "--config", str(cfg), "--epochs", "1",
                 "--lr", "1e-3", "--batch", "16", "--seed", "11", "--out", str(out),
                 "--checkpoint", str(ckpt)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["pass"]
    metrics = doc["extra"]["metrics"]
    assert np.isfinite(metrics["test_mae"]) and np.isfinite(metrics["trivial_mae"]["test"])
    assert ckpt.exists()
    history = doc["extra"]["history"]
    assert len(history) == 1 and np.isfinite(history[0]["train_mae"])


def test_trivial_predictor_zero_on_empty_graphs(tmp_path):
    generate_counting_dataset(30, 5, 6, 0.0, ["triangle"], seed=1, out_dir=tmp_path)
    m = train_counting(tmp_path, MODEL_CFG, epochs=1, lr=1e-3, batch_size=16, seed=2)
    assert m["trivial_mae"]["test"] == 0.0


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_detected_reports_epoch(tmp_path):
    from subgraph_lab.errors import DivergenceDetected

    generate_counting_dataset(24, 5, 6, 0.3, ["triangle"], seed=3, out_dir=tmp_path)
    with pytest.raises(DivergenceDetected) as err:
        train_counting(tmp_path, MODEL_CFG, epochs=20, lr=1e160, batch_size=16, seed=2)
    assert err.value.epoch >= 0


def test_cli_separate(tmp_path):
    cfg = tmp_path / "model.json"
    cfg.write_text(json.dumps({
        "policy": "NM", "layers": {"kind": "SUN", "mode": "linear", "count": 2, "width": 4},
        "pooling": {"kind": "ROOT_POOL"}, "head": {},
    }))
    out = tmp_path / "sep.json"
    code = main(["separate", "--pair", "c6_vs_2c3", "--config", str(cfg),
                 "--n-seeds", "3", "--seed", "5", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    verdict = doc["extra"]["c6_vs_2c3"]
    assert verdict["wl1"] is False and verdict["fwl2"] is True
    assert len(verdict["distances"]) == 3


def test_cli_train_determinism(tmp_path):
    data = tmp_path / "data"
    generate_counting_dataset(24, 5, 6, 0.3, ["triangle"], seed=6, out_dir=data)
    cfg = tmp_path / "model.json"
    cfg.write_text(json.dumps(MODEL_CFG))
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["train", "--data", str(data), "--config", str(cfg), "--epochs", "3",
                     "--lr", "1e-3", "--batch", "8", "--seed", "21", "--out", str(out)]) == 0
        outs.append(Report.load(out).payload())
    assert outs[0] == outs[1]
