"""Group-driven gravitational contraction.

Each iteration: rebuild the neighbor index on the moved coordinates, pull
every grouped point toward its external k-NN (attraction scaled by the
point's current nearest-neighbor distance over the neighbor distance),
average those pulls per group, and translate each group rigidly by its
averaged vector. Forces are evaluated against an immutable coordinate
snapshot and all positions are committed in one update, so per-group
evaluation order can never leak into the result. Ungrouped points are
never touched.

Variants: "full" is the complete pipeline; "s" moves each low-density point
alone (no collaborative groups); "d" lets every positive-density point seed
the grouping; "g" replaces the distance-ratio weighting with a uniform
step magnitude.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .dataset import PointSet
from .density import DensityProfile, compute_density_profile
from .grouping import Group, GroupPartition, build_groups, seed_groups, singleton_partition
from .neighbors import NeighborIndex

VARIANTS = ("full", "s", "d", "g")
GROUPINGS = ("seed", "component")


@dataclass(frozen=True)
class ContractionConfig:
    """Neighbor count, step coefficient, iteration budget and variant switch."""

    k: int
    step_size: float
    iterations: int
    variant: str = "full"
    stop_epsilon: Optional[float] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "step_size": self.step_size,
            "iterations": self.iterations,
            "variant": self.variant,
            "stop_epsilon": self.stop_epsilon,
        }


@dataclass
class StepStats:
    iteration: int
    max_displacement: float
    mean_displacement: float


@dataclass
class ContractionTrace:
    """Per-iteration displacement summary, optional coordinate snapshots."""

    steps: List[StepStats] = field(default_factory=list)
    warning: Optional[str] = None
    snapshots: Optional[List[np.ndarray]] = None
    timings: Dict[str, float] = field(default_factory=dict)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "max_displacement", "mean_displacement"])
            for s in self.steps:
                w.writerow([s.iteration, repr(s.max_displacement), repr(s.mean_displacement)])

    def summary(self) -> dict:
        return {
            "iterations_run": len(self.steps),
            "final_max_displacement": self.steps[-1].max_displacement if self.steps else 0.0,
            "warning": self.warning,
        }


def response_vector(x_m: np.ndarray, x_n: np.ndarray, nearest_dist: float, step_size: float) -> np.ndarray:
    """Pull on x_m toward x_n with magnitude step_size * nearest_dist / d(m,n).

    nearest_dist is x_m's distance to its nearest neighbor, so the magnitude
    never exceeds step_size when x_n is any neighbor of x_m. Coincident
    points contribute nothing.
    """
    x_m = np.asarray(x_m, dtype=np.float64)
    x_n = np.asarray(x_n, dtype=np.float64)
    diff = x_n - x_m
    d = float(np.linalg.norm(diff))
    if d == 0.0:
        return np.zeros_like(diff)
    return (step_size * nearest_dist / (d * d)) * diff


def member_force(
    point_id: int,
    group: Group,
    ix: NeighborIndex,
    cfg: ContractionConfig,
) -> np.ndarray:
    """Sum of response vectors from the point's k-NN outside its own group.

    The "g" variant swaps the distance-ratio magnitude for the constant
    step_size. Returns the zero vector when every neighbor is internal.
    """
    if point_id not in group.all:
        raise ValueError(f"point {point_id} is not in group {group.group_id}")
    k_eff = min(cfg.k, ix.n - 1)
    neighbors = ix.knn(point_id, k_eff)
    nearest = neighbors[0][1]
    inside = group.all
    force = np.zeros(ix.coords.shape[1])
    for nb, d in neighbors:
        if nb in inside:
            continue
        if d == 0.0:
            continue
        diff = ix.coords[nb] - ix.coords[point_id]
        if cfg.variant == "g":
            force += (cfg.step_size / d) * diff
        else:
            force += (cfg.step_size * nearest / (d * d)) * diff
    return force


def group_force(group: Group, forces: Mapping[int, np.ndarray]) -> np.ndarray:
    """Arithmetic mean of the member forces over every point in the group."""
    total = None
    for pid in sorted(group.all):
        f = np.asarray(forces[pid], dtype=np.float64)
        total = f.copy() if total is None else total + f
    return total / group.size


def _bulk_group_deltas(
    coords: np.ndarray,
    assign: np.ndarray,
    n_groups: int,
    group_sizes: np.ndarray,
    cfg: ContractionConfig,
    workers: int = 1,
) -> np.ndarray:
    """Per-group translation vectors for one step, computed in one pass.

    Shares a single bulk k-NN query across the member-force and
    nearest-distance computations; numerically identical to summing
    member_force per point and averaging per group.
    """
    n, d = coords.shape
    ix = NeighborIndex(coords, workers=workers)
    k_eff = min(cfg.k, n - 1)
    nb_dist, nb_ids = ix.knn_arrays(k_eff)
    nearest = nb_dist[:, 0]

    grouped = assign >= 0
    external = np.empty_like(nb_ids, dtype=bool)
    external[:] = assign[nb_ids] != assign[:, None]
    safe = nb_dist > 0.0
    active = external & safe & grouped[:, None]

    with np.errstate(divide="ignore", invalid="ignore"):
        if cfg.variant == "g":
            w = np.where(active, cfg.step_size / nb_dist, 0.0)
        else:
            w = np.where(active, cfg.step_size * nearest[:, None] / (nb_dist * nb_dist), 0.0)
    diffs = coords[nb_ids] - coords[:, None, :]
    member = np.einsum("nk,nkd->nd", w, diffs)

    deltas = np.zeros((n_groups, d))
    np.add.at(deltas, assign[grouped], member[grouped])
    deltas /= group_sizes[:, None]
    return deltas


def contraction_step(
    ps: PointSet,
    partition: GroupPartition,
    cfg: ContractionConfig,
    workers: int = 1,
) -> Tuple[PointSet, StepStats]:
    """One rigid translation of every group on a fresh index.

    All member forces are computed against the current snapshot before any
    position changes; points outside every group keep their coordinates
    bit for bit.
    """
    coords = ps.coords
    n = ps.n
    assign = partition.assignment_array(n)
    if partition.n_groups == 0:
        return ps, StepStats(iteration=0, max_displacement=0.0, mean_displacement=0.0)
    sizes = np.array([g.size for g in partition.groups], dtype=np.float64)
    deltas = _bulk_group_deltas(coords, assign, partition.n_groups, sizes, cfg, workers=workers)

    new_coords = coords.copy()
    grouped = assign >= 0
    new_coords[grouped] += deltas[assign[grouped]]

    norms = np.linalg.norm(deltas, axis=1)
    stats = StepStats(iteration=0, max_displacement=float(norms.max()), mean_displacement=float(norms.mean()))
    return ps.with_coords(new_coords), stats


@dataclass
class GcaoResult:
    """Contracted points plus the frozen partition, trace and density profile."""

    points: PointSet
    partition: GroupPartition
    trace: ContractionTrace
    profile: DensityProfile


def run_gcao(
    ps: PointSet,
    cfg: ContractionConfig,
    workers: int = 1,
    keep_snapshots: bool = False,
    grouping: str = "seed",
) -> GcaoResult:
    """Density pass and group formation once, then the iterated contraction.

    The neighbor index and nearest-neighbor distances are rebuilt every
    iteration on the moved coordinates; the partition is frozen. When the
    low-density set is empty there is nothing to move and the input comes
    back unchanged with a warning on the trace. ``grouping`` selects the
    per-seed construction (default) or the merged connected-component one.
    """
    if ps.n < 2:
        raise ValueError("contraction needs N >= 2")
    if grouping not in GROUPINGS:
        raise ValueError(f"grouping must be one of {GROUPINGS}, got {grouping!r}")
    t0 = time.perf_counter()
    ix = NeighborIndex(ps.coords, workers=workers)
    profile = compute_density_profile(ix)
    t_density = time.perf_counter() - t0

    if cfg.variant == "d":
        seed_ids = np.flatnonzero(profile.densities > 0)
    else:
        seed_ids = profile.low_density_ids

    trace = ContractionTrace(snapshots=[ps.coords.copy()] if keep_snapshots else None)
    trace.timings["density"] = t_density
    if len(seed_ids) == 0:
        trace.warning = "empty low-density set: nothing to contract"
        empty = GroupPartition(groups=(), assignment={})
        return GcaoResult(ps, empty, trace, profile)

    t0 = time.perf_counter()
    if cfg.variant == "s":
        partition = singleton_partition(seed_ids)
    elif grouping == "seed":
        partition = seed_groups(ix, profile, cfg.k, seed_ids=seed_ids)
    else:
        partition = build_groups(ix, profile, cfg.k, low_ids=seed_ids)
    trace.timings["grouping"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    current = ps
    for t in range(cfg.iterations):
        current, stats = contraction_step(current, partition, cfg, workers=workers)
        stats.iteration = t
        trace.steps.append(stats)
        if keep_snapshots:
            trace.snapshots.append(current.coords.copy())
        if cfg.stop_epsilon is not None and stats.max_displacement < cfg.stop_epsilon:
            break
    trace.timings["contraction"] = time.perf_counter() - t0
    return GcaoResult(current, partition, trace, profile)
