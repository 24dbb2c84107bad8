"""Point set loading, validation, standardization and synthetic fixtures."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class PointSet:
    """An N x d coordinate matrix with optional integer ground-truth labels.

    Coordinates are always finite float64. Labels, when present, are
    non-negative integers of length N. Point ids are the implicit row
    indices 0..N-1.
    """

    coords: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2:
            raise ValueError(f"coords must be 2-D, got shape {coords.shape}")
        n, d = coords.shape
        if n < 1 or d < 1:
            raise ValueError(f"need N >= 1 and d >= 1, got N={n}, d={d}")
        if not np.all(np.isfinite(coords)):
            bad = np.argwhere(~np.isfinite(coords))[0]
            raise ValueError(f"non-finite coordinate at row {bad[0]}, column {bad[1]}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError(f"labels length {labels.shape} does not match N={n}")
            if labels.min() < 0:
                raise ValueError("labels must be non-negative integers")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def with_coords(self, coords: np.ndarray) -> "PointSet":
        """Same labels, new coordinates (used by the contraction engine)."""
        return PointSet(coords, self.labels)


def _factorize(values: Sequence) -> np.ndarray:
    """Map values to 0..C-1 in first-appearance order."""
    codes = {}
    out = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        if v not in codes:
            codes[v] = len(codes)
        out[i] = codes[v]
    return out


def load_csv(
    path,
    label_column: Union[int, str, None] = None,
    has_header: bool = False,
) -> PointSet:
    """Load a comma-delimited point set.

    Every non-label cell must parse as a finite real and all rows must have
    the same width. ``label_column`` selects the ground-truth column either
    by index or, when ``has_header`` is set, by name; label values are
    factorized to 0..C-1 in first-appearance order.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: empty file")

    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows after header")

    width = len(rows[0])
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, str):
            if header is None:
                raise ValueError("label column given by name requires has_header=True")
            if label_column not in header:
                raise ValueError(f"label column {label_column!r} not in header {header}")
            label_idx = header.index(label_column)
        else:
            label_idx = int(label_column)
            if label_idx < 0:
                label_idx += width
            if not 0 <= label_idx < width:
                raise ValueError(f"label column index {label_column} out of range for width {width}")

    raw_labels = []
    data = []
    for r, row in enumerate(rows):
        if len(row) != width:
            line = r + 1 + (1 if has_header else 0)
            raise ValueError(f"{path}: ragged row at line {line}: {len(row)} fields, expected {width}")
        vals = []
        for c, cell in enumerate(row):
            if c == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                v = float(cell)
            except ValueError:
                line = r + 1 + (1 if has_header else 0)
                col = header[c] if header else str(c)
                raise ValueError(f"{path}: non-numeric cell at line {line}, column {col}: {cell!r}") from None
            if not np.isfinite(v):
                line = r + 1 + (1 if has_header else 0)
                col = header[c] if header else str(c)
                raise ValueError(f"{path}: non-finite value at line {line}, column {col}: {cell!r}")
            vals.append(v)
        data.append(vals)

    coords = np.asarray(data, dtype=np.float64)
    if coords.shape[1] < 1:
        raise ValueError(f"{path}: no numeric columns")
    labels = _factorize(raw_labels) if label_idx is not None else None
    return PointSet(coords, labels)


def write_csv(ps: PointSet, path, header: bool = False) -> None:
    """Write a point set as CSV; floats use shortest round-trip formatting,
    so load_csv(write_csv(ps)) reproduces coordinates exactly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            cols = [f"x{j}" for j in range(ps.dim)]
            if ps.labels is not None:
                cols.append("label")
            w.writerow(cols)
        for i in range(ps.n):
            row = [repr(float(v)) for v in ps.coords[i]]
            if ps.labels is not None:
                row.append(str(int(ps.labels[i])))
            w.writerow(row)


def standardize(ps: PointSet) -> PointSet:
    """Z-score each column (population standard deviation).

    Zero-variance columns become all-zero. Labels pass through unchanged.
    """
    if ps.n < 2:
        raise ValueError("standardize needs N >= 2")
    mean = ps.coords.mean(axis=0)
    sd = ps.coords.std(axis=0)
    centered = ps.coords - mean
    out = np.divide(centered, sd, out=np.zeros_like(centered), where=sd > 0)
    return PointSet(out, ps.labels)


def make_blobs(
    n_points: int,
    d: int,
    n_clusters: int,
    spread: float,
    separation: float,
    seed: int,
    weights: Optional[Sequence[float]] = None,
) -> PointSet:
    """Isotropic Gaussian clusters with centers at mutual distance >= separation.

    Per-cluster sd is ``spread`` and labels record the generating cluster.
    Sizes are as even as possible, or proportional to ``weights`` (one
    positive weight per cluster, each cluster non-empty). Deterministic for
    a fixed seed.
    """
    if n_clusters > n_points:
        raise ValueError(f"n_clusters={n_clusters} exceeds n_points={n_points}")
    if n_clusters < 1 or d < 1:
        raise ValueError("need n_clusters >= 1 and d >= 1")
    if spread <= 0 or separation <= 0:
        raise ValueError("spread and separation must be positive")
    if weights is not None and (len(weights) != n_clusters or min(weights) <= 0):
        raise ValueError("weights must give one positive value per cluster")

    rng = np.random.default_rng(seed)
    # Rejection-sample centers in a box sized so typical nearest-center
    # spacing stays close to the requested separation; grow it on stall.
    side = separation * max(1.5, 1.3 * n_clusters ** (1.0 / d))
    centers = []
    attempts = 0
    while len(centers) < n_clusters:
        cand = rng.uniform(0.0, side, size=d)
        if all(np.linalg.norm(cand - c) >= separation for c in centers):
            centers.append(cand)
        attempts += 1
        if attempts > 200 * n_clusters:
            side *= 2.0
            attempts = 0
    centers = np.asarray(centers)

    if weights is None:
        base, extra = divmod(n_points, n_clusters)
        sizes = np.array([base + (1 if j < extra else 0) for j in range(n_clusters)])
    else:
        frac = np.asarray(weights, dtype=np.float64)
        frac = frac / frac.sum()
        sizes = np.maximum(1, np.round(frac * n_points).astype(np.int64))
        while sizes.sum() > n_points:
            sizes[np.argmax(sizes)] -= 1
        while sizes.sum() < n_points:
            sizes[np.argmax(sizes)] += 1
    coords = np.empty((n_points, d))
    labels = np.empty(n_points, dtype=np.int64)
    row = 0
    for j, size in enumerate(sizes):
        coords[row : row + size] = centers[j] + rng.normal(0.0, spread, size=(size, d))
        labels[row : row + size] = j
        row += size
    return PointSet(coords, labels)
