"""Command-line interface.

Subcommands:
  run    one contraction + clustering + metrics run on a CSV dataset
  grid   parallel hyperparameter search over k / lambda / iteration lists
  bench  synthetic scaling benchmark with per-stage growth exponents
  eval   score a predicted labeling against ground truth

Exit status is 0 on success; failures print a stage-attributed message and
exit nonzero. GCAO_WORKERS and GCAO_INNER_THREADS override worker counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .contraction import ContractionConfig, run_gcao
from .dataset import make_blobs, standardize
from .evaluation import evaluate
from .pipeline import (
    PipelineConfig,
    PipelineError,
    RunRecord,
    grid_search,
    run_pipeline,
    runtime_report,
)


def _parse_label_col(value):
    if value is None:
        return None
    try:
        return int(value)
    except ValueError:
        return value


def _parse_int_list(text: str):
    """Accept "3..6" (inclusive range) or "3,4,5" or a single value."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def _parse_float_list(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


def _env_workers(default: int) -> int:
    return int(os.environ.get("GCAO_WORKERS", default))


def _env_inner(default: int) -> int:
    return int(os.environ.get("GCAO_INNER_THREADS", default))


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV dataset path")
    p.add_argument("--label-col", default=None, help="label column index or name")
    p.add_argument("--header", action="store_true", help="dataset has a header row")
    p.add_argument("--no-standardize", action="store_true", help="skip feature standardization")
    p.add_argument("--kmeans-k", type=int, default=None, help="cluster count (default: number of classes)")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gcao", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single pipeline run")
    _add_run_args(run)
    run.add_argument("--k", type=int, required=True, help="neighbor count")
    run.add_argument("--lambda", dest="step_size", type=float, required=True, help="step size coefficient")
    run.add_argument("--iters", type=int, required=True, help="contraction iterations")
    run.add_argument("--variant", choices=["full", "s", "d", "g"], default="full")
    run.add_argument("--stop-epsilon", type=float, default=None, help="optional early-stop displacement threshold")
    run.add_argument("--dump-density", action="store_true", help="write density.json diagnostic")
    run.add_argument("--dump-groups", action="store_true", help="write groups.json diagnostic")

    grid = sub.add_parser("grid", help="hyperparameter grid search")
    _add_run_args(grid)
    grid.add_argument("--k", required=True, help="k values, e.g. 3..20 or 4,8")
    grid.add_argument("--lambda", dest="step_size", required=True, help="lambda values, e.g. 0.1,0.7,2.0")
    grid.add_argument("--iters", required=True, help="iteration values, e.g. 1..10")
    grid.add_argument("--variant", choices=["full", "s", "d", "g"], default="full")
    grid.add_argument("--workers", type=int, default=1)

    bench = sub.add_parser("bench", help="synthetic scaling benchmark")
    bench.add_argument("--sizes", required=True, help="comma list of N, e.g. 5000,10000,20000")
    bench.add_argument("--d", type=int, default=8)
    bench.add_argument("--clusters", type=int, default=4)
    bench.add_argument("--spread", type=float, default=1.0)
    bench.add_argument("--separation", type=float, default=8.0)
    bench.add_argument("--k", type=int, default=8)
    bench.add_argument("--lambda", dest="step_size", type=float, default=0.5)
    bench.add_argument("--iters", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default=None)

    ev = sub.add_parser("eval", help="score predicted labels against ground truth")
    ev.add_argument("--truth", required=True, help="file with one integer label per line")
    ev.add_argument("--pred", required=True, help="file with one integer label per line")
    return ap


def _cmd_run(args) -> int:
    cfg = PipelineConfig(
        contraction=ContractionConfig(
            k=args.k,
            step_size=args.step_size,
            iterations=args.iters,
            variant=args.variant,
            stop_epsilon=args.stop_epsilon,
        ),
        data=args.data,
        label_column=_parse_label_col(args.label_col),
        has_header=args.header,
        standardize=not args.no_standardize,
        kmeans_k=args.kmeans_k,
        restarts=args.restarts,
        seed=args.seed,
        inner_threads=_env_inner(1),
        out_dir=args.out,
        dump_density=args.dump_density,
        dump_groups=args.dump_groups,
    )
    record = run_pipeline(cfg)
    print(json.dumps(record.to_dict(), indent=2))
    return 0


def _cmd_grid(args) -> int:
    cfg = PipelineConfig(
        contraction=ContractionConfig(k=1, step_size=1.0, iterations=1, variant=args.variant),
        data=args.data,
        label_column=_parse_label_col(args.label_col),
        has_header=args.header,
        standardize=not args.no_standardize,
        kmeans_k=args.kmeans_k,
        restarts=args.restarts,
        seed=args.seed,
        workers=_env_workers(args.workers),
        inner_threads=_env_inner(1),
        out_dir=args.out,
        grid_k=_parse_int_list(args.k),
        grid_step_size=_parse_float_list(args.step_size),
        grid_iterations=_parse_int_list(args.iters),
    )
    best, records = grid_search(cfg)
    print(json.dumps({"best": best.to_dict(), "cells": len(records)}, indent=2))
    return 0


def _cmd_bench(args) -> int:
    sizes = _parse_int_list(args.sizes)
    records = []
    for n in sizes:
        ps = make_blobs(n, args.d, args.clusters, args.spread, args.separation, args.seed)
        ps = standardize(ps)
        cfg = ContractionConfig(k=args.k, step_size=args.step_size, iterations=args.iters)
        t0 = time.perf_counter()
        result = run_gcao(ps, cfg, workers=_env_inner(1))
        total = time.perf_counter() - t0
        timings = dict(result.trace.timings)
        timings["total"] = total
        records.append(
            RunRecord(
                config={"contraction": cfg.to_dict(), "data": f"blobs-{n}"},
                n_points=n,
                dim=args.d,
                report=None,
                trace_summary=result.trace.summary(),
                timings=timings,
            )
        )
        print(f"N={n}: " + " ".join(f"{k}={v:.3f}s" for k, v in timings.items()), file=sys.stderr)
    summary = runtime_report(records)
    print(json.dumps(summary, indent=2))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stages = sorted({s for r in records for s in r.timings})
        lines = ["n," + ",".join(stages)]
        for row in summary["rows"]:
            lines.append(str(row["n"]) + "," + ",".join(f"{row.get(s, 0.0):.6f}" for s in stages))
        (out / "bench.csv").write_text("\n".join(lines) + "\n")
    return 0


def _read_label_file(path) -> np.ndarray:
    values = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                values.append(int(float(line.split(",")[0])))
    if not values:
        raise ValueError(f"{path}: no labels found")
    return np.asarray(values, dtype=np.int64)


def _cmd_eval(args) -> int:
    truth = _read_label_file(args.truth)
    pred = _read_label_file(args.pred)
    print(json.dumps(evaluate(truth, pred), indent=2))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "grid": _cmd_grid, "bench": _cmd_bench, "eval": _cmd_eval}
    try:
        return handlers[args.command](args)
    except PipelineError as exc:
        print(f"gcao: error in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"gcao: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
