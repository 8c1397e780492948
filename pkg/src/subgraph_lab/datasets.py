"""Counting datasets: Erdos-Renyi graphs with exact substructure counts as targets.

JSONL rows {"n", "edges", "y"} (features default to one constant channel);
targets are normalized by the training-split standard deviation, which is
recorded with the rest of the generation footprint in a meta.json sidecar.
The 80/10/10 split is fixed by index.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .counting import PATTERNS, count_substructure
from .errors import IoError, ParseError, SubgraphLabError
from .graphs import Graph, graph_from_dict
from .rng import Rng

SPLITS = ("train", "val", "test")


def generate_counting_dataset(n_graphs: int, n_min: int, n_max: int, p: float,
                              patterns: list, seed: int, out_dir) -> dict:
    for pat in patterns:
        if pat not in PATTERNS:
            raise SubgraphLabError(f"unsupported pattern {pat!r}")
    rng = Rng(seed).substream("data.counting")
    rows = []
    for _ in range(n_graphs):
        n = rng.randint(n_min, n_max)
        g_seed = rng.next_u64()
        from .graphs import erdos_renyi

        g = erdos_renyi(n, p, g_seed)
        y = [float(count_substructure(g, pat, "graph")) for pat in patterns]
        rows.append((g, y))

    n_train = int(0.8 * n_graphs)
    n_val = int(0.9 * n_graphs) - n_train
    bounds = {"train": (0, n_train), "val": (n_train, n_train + n_val),
              "test": (n_train + n_val, n_graphs)}

    train_y = np.array([y for _, y in rows[: n_train]], dtype=np.float64)
    std = train_y.std(axis=0) if len(train_y) else np.ones(len(patterns))
    normalizer = np.where(std > 0, std, 1.0)

    try:
        os.makedirs(out_dir, exist_ok=True)
        for split, (lo, hi) in bounds.items():
            with open(os.path.join(out_dir, f"{split}.jsonl"), "w") as fh:
                for g, y in rows[lo:hi]:
                    doc = {
                        "n": g.n,
                        "edges": [[u, v] for u, v in g.edges],
                        "y": [yi / ni for yi, ni in zip(y, normalizer)],
                    }
                    fh.write(json.dumps(doc) + "\n")
        meta = {
            "patterns": list(patterns),
            "normalizer": normalizer.tolist(),
            "seed": seed,
            "p": p,
            "n_range": [n_min, n_max],
            "sizes": {split: hi - lo for split, (lo, hi) in bounds.items()},
        }
        with open(os.path.join(out_dir, "meta.json"), "w") as fh:
            json.dump(meta, fh, sort_keys=True, indent=1)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return meta


def load_split(dataset_dir, split: str) -> tuple[list[Graph], np.ndarray]:
    path = os.path.join(dataset_dir, f"{split}.jsonl")
    graphs_, ys = [], []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{path}:{lineno}: {exc.msg}") from exc
                y = doc.pop("y", None)
                graphs_.append(graph_from_dict(doc))
                ys.append(y if isinstance(y, list) else [y])
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return graphs_, np.array(ys, dtype=np.float64)


def load_meta(dataset_dir) -> dict:
    try:
        with open(os.path.join(dataset_dir, "meta.json")) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(str(exc)) from exc
