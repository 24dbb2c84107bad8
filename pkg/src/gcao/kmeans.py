"""Lloyd k-means with spreading initialization and multiple restarts.

Restarts draw from independent seeded streams and the best run by
within-cluster sum of squares wins, so results are deterministic for a
fixed seed.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np


def _init_centers(coords: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy spreading: first center uniform, then sample proportional to
    squared distance from the chosen set; exhausted mass falls back to the
    lowest unused ids."""
    n = coords.shape[0]
    centers = np.empty((k, coords.shape[1]))
    first = int(rng.integers(n))
    centers[0] = coords[first]
    chosen = {first}
    d2 = ((coords - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = next(i for i in range(n) if i not in chosen)
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[c] = coords[idx]
        chosen.add(idx)
        d2 = np.minimum(d2, ((coords - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(coords: np.ndarray, centers: np.ndarray, max_iter: int) -> Tuple[np.ndarray, float]:
    n, k = coords.shape[0], centers.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((coords[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        point_d2 = d2[np.arange(n), new_labels]
        empty = [c for c in range(k) if not np.any(new_labels == c)]
        if empty:
            # Re-seed each empty cluster on the currently worst-fit point.
            order = np.argsort(-point_d2)
            for c, victim in zip(empty, order):
                centers[c] = coords[victim]
            continue
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = coords[labels == c].mean(axis=0)
    d2 = ((coords[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    wcss = float(d2[np.arange(n), labels].sum())
    return labels, wcss


def kmeans(
    points,
    n_clusters: int,
    restarts: int = 10,
    seed: int = 0,
    max_iter: int = 100,
) -> np.ndarray:
    """Cluster labels for the best of `restarts` Lloyd runs.

    `points` is a PointSet or an N x d array. n_clusters must not exceed N.
    """
    coords = np.asarray(getattr(points, "coords", points), dtype=np.float64)
    n = coords.shape[0]
    if n_clusters > n:
        raise ValueError(f"n_clusters={n_clusters} exceeds N={n}")
    if n_clusters < 1:
        raise ValueError("n_clusters must be >= 1")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")

    best_labels = None
    best_wcss = np.inf
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        centers = _init_centers(coords, n_clusters, rng)
        labels, wcss = _lloyd(coords, centers.copy(), max_iter)
        if wcss < best_wcss:
            best_wcss = wcss
            best_labels = labels
    return best_labels


def wcss_of(points, labels: np.ndarray) -> float:
    """Within-cluster sum of squares for a given labeling."""
    coords = np.asarray(getattr(points, "coords", points), dtype=np.float64)
    total = 0.0
    for c in np.unique(labels):
        cluster = coords[labels == c]
        total += float(((cluster - cluster.mean(axis=0)) ** 2).sum())
    return total
