"""End-to-end orchestration: ingest, standardize, contract, cluster, score.

Also the parallel grid search over (k, step size, iterations) and the
runtime scaling report. Every run is reproducible from its config snapshot:
the seed feeds both the synthetic fixtures and the clusterer.
"""

from __future__ import annotations

import itertools
import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .contraction import ContractionConfig, GcaoResult, run_gcao
from .dataset import PointSet, load_csv, standardize, write_csv
from .evaluation import EvaluationReport, evaluate
from .kmeans import kmeans

# Ranges the hyperparameter search was validated over; values outside only warn.
DOCUMENTED_RANGES = {"k": (3, 20), "step_size": (0.1, 2.0), "iterations": (1, 10)}

RESULTS_HEADER = "dataset,variant,k,lambda,iters,nmi,ari,homogeneity,acc,seconds"


class PipelineError(RuntimeError):
    """A stage failure, tagged with the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    """One run: dataset, contraction settings, downstream clusterer, outputs."""

    contraction: ContractionConfig
    data: Optional[Union[str, Path]] = None
    label_column: Optional[Union[int, str]] = None
    has_header: bool = False
    standardize: bool = True
    clusterer: str = "kmeans"
    kmeans_k: Optional[int] = None  # None: number of ground-truth classes
    restarts: int = 20
    kmeans_max_iter: int = 100
    seed: int = 0
    workers: int = 1
    inner_threads: int = 1
    out_dir: Optional[Union[str, Path]] = None
    dump_density: bool = False
    dump_groups: bool = False
    grid_k: Optional[List[int]] = None
    grid_step_size: Optional[List[float]] = None
    grid_iterations: Optional[List[int]] = None

    def to_dict(self) -> dict:
        return {
            "data": str(self.data) if self.data is not None else None,
            "label_column": self.label_column,
            "has_header": self.has_header,
            "standardize": self.standardize,
            "contraction": self.contraction.to_dict(),
            "clusterer": self.clusterer,
            "kmeans_k": self.kmeans_k,
            "restarts": self.restarts,
            "kmeans_max_iter": self.kmeans_max_iter,
            "seed": self.seed,
            "workers": self.workers,
            "inner_threads": self.inner_threads,
            "out_dir": str(self.out_dir) if self.out_dir is not None else None,
        }


@dataclass
class RunRecord:
    """Everything one pipeline execution produced."""

    config: dict
    n_points: int
    dim: int
    report: Optional[EvaluationReport]
    trace_summary: dict
    predicted: Optional[np.ndarray] = None
    started_at: float = 0.0
    finished_at: float = 0.0
    error: Optional[str] = None
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def total_seconds(self) -> float:
        return self.finished_at - self.started_at

    def csv_row(self) -> str:
        c = self.config["contraction"]
        name = self.config.get("data") or "memory"
        if self.report is not None:
            vals = [self.report.nmi, self.report.ari, self.report.homogeneity, self.report.acc]
            metric_cells = [f"{v:.6f}" for v in vals]
        else:
            metric_cells = [""] * 4
        cells = [
            Path(name).name if name != "memory" else name,
            c["variant"],
            str(c["k"]),
            str(c["step_size"]),
            str(c["iterations"]),
            *metric_cells,
            f"{self.total_seconds:.3f}",
        ]
        return ",".join(cells)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "n_points": self.n_points,
            "dim": self.dim,
            "report": self.report.to_dict() if self.report else None,
            "trace": self.trace_summary,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "error": self.error,
            "timings": self.timings,
        }


def _timed(timings: Dict[str, float], stage: str, fn, *args, **kwargs):
    t0 = time.perf_counter()
    try:
        out = fn(*args, **kwargs)
    except Exception as exc:
        raise PipelineError(stage, exc) from exc
    timings[stage] = time.perf_counter() - t0
    return out


def run_pipeline(cfg: PipelineConfig, points: Optional[PointSet] = None) -> RunRecord:
    """Execute load -> standardize -> contraction -> clustering -> metrics.

    `points` bypasses the load stage for in-memory data. Clustering and
    metrics run only when a cluster count is known (explicit kmeans_k or
    ground-truth labels), so unlabeled data yields a contraction-only run.
    Outputs land in cfg.out_dir when set.
    """
    started = time.time()
    timings: Dict[str, float] = {}

    if points is None:
        if cfg.data is None:
            raise PipelineError("load", ValueError("no dataset: provide cfg.data or points"))
        points = _timed(timings, "load", load_csv, cfg.data, cfg.label_column, cfg.has_header)
    ps = points

    if cfg.standardize:
        ps = _timed(timings, "standardize", standardize, ps)

    result: GcaoResult = _timed(timings, "contraction", run_gcao, ps, cfg.contraction, cfg.inner_threads)
    # The engine times its own phases; report density/grouping as stages of
    # their own and let "contraction" mean the iteration loop alone.
    del timings["contraction"]
    timings.update(result.trace.timings)
    contracted = result.points

    predicted = None
    report = None
    k_clusters = cfg.kmeans_k
    if k_clusters is None and ps.labels is not None:
        k_clusters = int(len(np.unique(ps.labels)))
    if k_clusters is not None:
        if cfg.clusterer != "kmeans":
            raise PipelineError("clustering", ValueError(f"unknown clusterer {cfg.clusterer!r}"))
        predicted = _timed(
            timings, "clustering", kmeans, contracted, k_clusters, cfg.restarts, cfg.seed, cfg.kmeans_max_iter
        )
        if ps.labels is not None:
            metrics = _timed(timings, "metrics", evaluate, ps.labels, predicted)
            report = EvaluationReport.from_metrics(metrics, timings)

    record = RunRecord(
        config=cfg.to_dict(),
        n_points=ps.n,
        dim=ps.dim,
        report=report,
        trace_summary=result.trace.summary(),
        predicted=predicted,
        started_at=started,
        finished_at=time.time(),
        timings=timings,
    )
    if report is not None:
        report.timings = dict(timings)

    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2))
        (out / "report.json").write_text(json.dumps(record.to_dict(), indent=2))
        (out / "results.csv").write_text(RESULTS_HEADER + "\n" + record.csv_row() + "\n")
        result.trace.write_csv(out / "trace.csv")
        write_csv(contracted, out / "contracted.csv")
        if predicted is not None:
            (out / "predictions.csv").write_text("\n".join(str(int(v)) for v in predicted) + "\n")
        if cfg.dump_density:
            (out / "density.json").write_text(result.profile.to_json(indent=2))
        if cfg.dump_groups:
            (out / "groups.json").write_text(result.partition.to_json(indent=2))
    return record


def _warn_outside_ranges(cfg: PipelineConfig) -> None:
    for name, values in (
        ("k", cfg.grid_k),
        ("step_size", cfg.grid_step_size),
        ("iterations", cfg.grid_iterations),
    ):
        lo, hi = DOCUMENTED_RANGES[name]
        for v in values:
            if not lo <= v <= hi:
                warnings.warn(f"grid value {name}={v} outside the documented range [{lo}, {hi}]")


def _grid_cell(args: Tuple[PipelineConfig, int, float, int]) -> RunRecord:
    base, k, step, iters = args
    try:
        cell_cfg = replace(
            base,
            contraction=replace(base.contraction, k=k, step_size=step, iterations=iters),
            out_dir=None,
            workers=1,
        )
        return run_pipeline(cell_cfg)
    except Exception as exc:
        failed = base.to_dict()
        failed["contraction"].update({"k": k, "step_size": step, "iterations": iters})
        return RunRecord(
            config=failed,
            n_points=0,
            dim=0,
            report=None,
            trace_summary={},
            error=str(exc),
        )


def grid_search(cfg: PipelineConfig) -> Tuple[RunRecord, List[RunRecord]]:
    """Evaluate every (k, step, iterations) combination; best by ARI,
    ties broken by NMI then by fewer iterations.

    Cells run across cfg.workers processes; a failing cell becomes an error
    record and the search continues. Returns (best, all records sorted by
    descending ARI)."""
    if not (cfg.grid_k and cfg.grid_step_size and cfg.grid_iterations):
        raise ValueError("grid search needs non-empty grid_k, grid_step_size and grid_iterations")
    _warn_outside_ranges(cfg)

    combos = list(itertools.product(cfg.grid_k, cfg.grid_step_size, cfg.grid_iterations))
    inner = cfg.inner_threads
    if cfg.workers > 1:
        inner = max(1, (os.cpu_count() or 1) // cfg.workers)
    base = replace(cfg, inner_threads=inner)
    jobs = [(base, k, s, t) for (k, s, t) in combos]

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_grid_cell, jobs))
    else:
        records = [_grid_cell(j) for j in jobs]

    def sort_key(item):
        rec = item[1]
        if rec.report is None:
            return (1, 0.0, 0.0, 0, item[0])
        return (0, -rec.report.ari, -rec.report.nmi, rec.config["contraction"]["iterations"], item[0])

    indexed = sorted(enumerate(records), key=sort_key)
    ordered = [rec for _, rec in indexed]
    scored = [r for r in ordered if r.report is not None]
    if not scored:
        raise RuntimeError("every grid cell failed")
    best = scored[0]

    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        lines = [RESULTS_HEADER + ",error"]
        for rec in ordered:
            lines.append(rec.csv_row() + "," + (rec.error or ""))
        (out / "grid_results.csv").write_text("\n".join(lines) + "\n")
        (out / "best.json").write_text(json.dumps(best.to_dict(), indent=2))
    return best, ordered


def runtime_report(records: Sequence[RunRecord]) -> dict:
    """N vs per-stage seconds plus empirical log-log growth exponents."""
    if len(records) < 2:
        raise ValueError("runtime report needs at least 2 records")
    sizes = [r.n_points for r in records]
    if len(set(sizes)) < 2:
        raise ValueError("runtime report needs records at different N")
    stages = sorted({s for r in records for s in r.timings})
    rows = [
        {"n": r.n_points, **{s: r.timings.get(s, 0.0) for s in stages}}
        for r in sorted(records, key=lambda r: r.n_points)
    ]
    slopes = {}
    log_n = np.log([row["n"] for row in rows])
    for s in stages:
        t = np.array([max(row[s], 1e-9) for row in rows])
        slopes[s] = float(np.polyfit(log_n, np.log(t), 1)[0])
    return {"rows": rows, "slopes": slopes}
