"""Full- or mini-batch Adam training on counting datasets.

Graphs are grouped by node count so each group stacks into one dense batch;
group order, chunking and every weight draw derive from the run seed, which
makes reports byte-reproducible.  MAE is the loss and the evaluation metric,
reported in normalized target units next to the trivial mean-predictor MAE.
"""

from __future__ import annotations

import numpy as np

from . import autograd as ag
from .autograd import Tape, adam_init, adam_step, backward, save_checkpoint
from .datasets import load_meta, load_split
from .errors import DivergenceDetected
from .layers import core as layer_core
from .layers.model import Model, build_model, model_forward_core
from .policy import apply_policy


def _make_batches(graphs_, ys, policy_kind, target_index: int, batch_size: int) -> list[dict]:
    order = sorted(range(len(graphs_)), key=lambda i: (graphs_[i].n, i))
    batches = []
    i = 0
    while i < len(order):
        n = graphs_[order[i]].n
        group = [j for j in order[i:] if graphs_[j].n == n][: max(batch_size, 1)]
        group = order[i: i + len(group)]
        bags = [apply_policy(graphs_[j], policy_kind) for j in group]
        batches.append({
            "n": n,
            "count": len(group),
            "sub_adj": np.stack([b.sub_adj for b in bags]).astype(np.float64),
            "orig_adj": np.stack([b.orig_adj for b in bags]).astype(np.float64),
            "membership": np.stack([b.membership for b in bags]).astype(np.float64),
            "x0": np.stack([b.sub_feat for b in bags]),
            "y": ys[group][:, target_index: target_index + 1],
        })
        i += len(group)
    return batches


def _forward_batch(model: Model, params_np: dict, batch: dict, with_grads: bool):
    tape = Tape()
    if with_grads:
        tensors = tape.parameters(params_np)
    else:
        tensors = {k: tape.constant(v) for k, v in params_np.items()}
    ctx = layer_core.BagCtx(tape, batch["sub_adj"], batch["orig_adj"], batch["membership"])
    x = tape.constant(batch["x0"])
    pred = model_forward_core(model, tape, tensors, x, ctx)  # (B, 1)
    y = tape.constant(batch["y"])
    diff = ag.subtract(pred, y)
    absd = ag.add(ag.relu(diff), ag.relu(ag.subtract(y, pred)))
    total = ag.sum_axis(ag.sum_axis(absd, 1), 0)
    return tape, total


def _eval_mae(model: Model, params_np: dict, batches: list) -> float:
    total, count = 0.0, 0
    for batch in batches:
        _, err = _forward_batch(model, params_np, batch, with_grads=False)
        total += float(err.values)
        count += batch["count"]
    return total / max(count, 1)


def train_counting(dataset_dir, model_config: dict, epochs: int, lr: float, batch_size: int,
                   seed: int, target_index: int = 0, checkpoint_path=None,
                   patience: int = 60, lr_decay_every: int = 50, lr_decay: float = 0.5) -> dict:
    """Train on a generated counting dataset; returns the metrics dict."""
    meta = load_meta(dataset_dir)
    splits = {}
    for split in ("train", "val", "test"):
        graphs_, ys = load_split(dataset_dir, split)
        splits[split] = (graphs_, ys)

    model = build_model(model_config, d_in=1, seed=seed)
    batches = {split: _make_batches(graphs_, ys, model.policy, target_index, batch_size)
               for split, (graphs_, ys) in splits.items()}

    train_y = splits["train"][1][:, target_index]
    trivial_pred = float(train_y.mean()) if len(train_y) else 0.0
    trivial_mae = {
        split: float(np.mean(np.abs(splits[split][1][:, target_index] - trivial_pred)))
        if len(splits[split][1]) else 0.0
        for split in ("train", "val", "test")
    }

    params = dict(model.params)
    state = adam_init(params)
    history = []
    best = {"epoch": -1, "val_mae": float("inf"), "params": dict(params)}
    n_train = sum(b["count"] for b in batches["train"])

    epochs_run = 0
    for epoch in range(epochs):
        cur_lr = lr * (lr_decay ** (epoch // lr_decay_every))
        train_total = 0.0
        for batch in batches["train"]:
            tape, err_sum = _forward_batch(model, params, batch, with_grads=True)
            if not np.isfinite(err_sum.values):
                raise DivergenceDetected(epoch)
            train_total += float(err_sum.values)
            loss = ag.elementwise_multiply(err_sum, tape.constant(np.array(1.0 / batch["count"])))
            grads = backward(tape, loss)
            state, params = adam_step(state, params, grads, cur_lr)
        train_mae = train_total / max(n_train, 1)
        val_mae = _eval_mae(model, params, batches["val"])
        if not (np.isfinite(train_mae) and np.isfinite(val_mae)):
            raise DivergenceDetected(epoch)
        history.append({"epoch": epoch, "lr": cur_lr, "train_mae": train_mae, "val_mae": val_mae})
        epochs_run = epoch + 1
        if val_mae < best["val_mae"]:
            best = {"epoch": epoch, "val_mae": val_mae, "params": dict(params)}
        elif epoch - best["epoch"] >= patience:
            break

    test_mae_best = _eval_mae(model, best["params"], batches["test"])
    test_mae_final = _eval_mae(model, params, batches["test"])
    if checkpoint_path is not None:
        save_checkpoint(checkpoint_path, best["params"])

    pattern = meta["patterns"][target_index] if target_index < len(meta.get("patterns", [])) else "?"
    return {
        "pattern": pattern,
        "target_index": target_index,
        "epochs_run": epochs_run,
        "history": history,
        "best_epoch": best["epoch"],
        "val_mae_best": best["val_mae"],
        "test_mae": test_mae_best,
        "test_mae_final": test_mae_final,
        "trivial_mae": trivial_mae,
        "normalizer": meta.get("normalizer"),
    }
