"""Command-line entry point.

Subcommands: gen-counting, verify, separate, train, report.  Every run takes a
mandatory --seed; all randomness derives from it.  Reports are JSON; the exit
code is 0 when all checks pass, 1 on a failing check, 2 on usage/config errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import SubgraphLabError
from .report import CheckRecord, Report, check, merge_reports


def _load_config(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _finish(report: Report, out_path) -> int:
    if out_path:
        report.dump(out_path)
    else:
        print(json.dumps(report.to_json(), sort_keys=True, indent=1))
    for rec in report.records:
        val = "" if rec.value is None else f" value={rec.value:.3e}"
        tol = "" if rec.tol is None else f" tol={rec.tol:.1e}"
        print(f"[{rec.status}] {rec.name}{val}{tol}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_gen_counting(args) -> int:
    from .datasets import generate_counting_dataset

    t0 = time.time()
    patterns = [p.strip() for p in args.patterns.split(",") if p.strip()]
    meta = generate_counting_dataset(args.n_graphs, args.n_min, args.n_max, args.p,
                                     patterns, args.seed, args.out)
    report = Report(
        "gen-counting",
        {"n_graphs": args.n_graphs, "n_min": args.n_min, "n_max": args.n_max, "p": args.p,
         "patterns": patterns, "seed": args.seed, "out": str(args.out)},
        (check("dataset_written", float(sum(meta["sizes"].values())), None,
               ok=sum(meta["sizes"].values()) == args.n_graphs),),
        extra={"meta": meta},
        wall_clock_s=time.time() - t0,
    )
    print(json.dumps(report.to_json(), sort_keys=True, indent=1))
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    from .verify import run_suite

    t0 = time.time()
    records = run_suite(args.suite, args.seed, args.tol)
    report = Report("verify", {"suite": args.suite, "seed": args.seed, "tol": args.tol},
                    tuple(records), wall_clock_s=time.time() - t0)
    return _finish(report, args.out)


def cmd_separate(args) -> int:
    from .separate import pair_verdict, resolve_pair

    t0 = time.time()
    config = _load_config(args.config)
    records = []
    extra = {}
    for name in args.pair:
        g1, g2, ids = resolve_pair(name, args.graph_a, args.graph_b)
        verdict = pair_verdict(g1, g2, config, args.n_seeds, args.seed,
                               args.sep_threshold, args.eq_threshold, ids=ids)
        extra[name] = verdict
        records.append(CheckRecord(f"separate[{name}]", "PASS",
                                   max(verdict["distances"], default=0.0), None))
    report = Report(
        "separate",
        {"pairs": list(args.pair), "config": config, "n_seeds": args.n_seeds,
         "seed": args.seed, "sep_threshold": args.sep_threshold,
         "eq_threshold": args.eq_threshold},
        tuple(records), extra=extra, wall_clock_s=time.time() - t0)
    return _finish(report, args.out)


def cmd_train(args) -> int:
    from .train import train_counting

    t0 = time.time()
    config = _load_config(args.config)
    metrics = train_counting(args.data, config, args.epochs, args.lr, args.batch,
                             args.seed, target_index=args.target_index,
                             checkpoint_path=args.checkpoint)
    finite = all(
        all(abs(e[k]) < float("inf") for k in ("train_mae", "val_mae")) for e in metrics["history"]
    )
    records = (check("training_metrics_finite", 0.0 if finite else 1.0, 0.0),)
    history = metrics.pop("history")
    report = Report(
        "train",
        {"data": str(args.data), "config": config, "epochs": args.epochs, "lr": args.lr,
         "batch": args.batch, "seed": args.seed, "target_index": args.target_index},
        records,
        extra={"metrics": metrics, "history": history},
        wall_clock_s=time.time() - t0)
    return _finish(report, args.out)


def cmd_report(args) -> int:
    merged = merge_reports(list(args.reports))
    if args.out:
        merged.dump(args.out)
    print(json.dumps(merged.to_json(), sort_keys=True, indent=1))
    return 0 if merged.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subgraph-lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-counting", help="generate a substructure-counting dataset")
    p.add_argument("--n-graphs", type=int, required=True)
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--patterns", type=str, default="triangle,cycle4")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(fn=cmd_gen_counting)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", type=str, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("separate", help="WL + model separation experiment")
    p.add_argument("--pair", action="append", required=True,
                   help="c6_vs_2c3 | rook_vs_shrikhande | custom (with --graph-a/--graph-b)")
    p.add_argument("--graph-a", type=str, default=None)
    p.add_argument("--graph-b", type=str, default=None)
    p.add_argument("--config", type=str, required=True)
    p.add_argument("--n-seeds", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sep-threshold", type=float, default=1e-3)
    p.add_argument("--eq-threshold", type=float, default=1e-6)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(fn=cmd_separate)

    p = sub.add_parser("train", help="train a model on a counting dataset")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--config", type=str, required=True)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch", type=int, default=128)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--target-index", type=int, default=0)
    p.add_argument("--checkpoint", type=str, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("report", help="merge run reports; exit 0 iff all PASS")
    p.add_argument("reports", nargs="*")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except SubgraphLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
