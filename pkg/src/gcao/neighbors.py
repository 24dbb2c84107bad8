"""Exact nearest-neighbor queries over a coordinate snapshot.

A kd-tree generates candidate sets; distances are then recomputed with
numpy and ties broken by ascending point id, so every query is exact and
deterministic (identical to a brute-force scan modulo nothing). The index
is immutable and valid only for the snapshot it was built from: the
contraction loop rebuilds it after every position update.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np
from scipy.spatial import cKDTree

# Relative slack when turning a candidate radius into a ball query, covering
# ulp-level disagreement between the tree's metric and numpy's.
_RADIUS_SLACK = 1e-9


class NeighborIndex:
    def __init__(self, coords: np.ndarray, workers: int = 1):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 2:
            raise ValueError("coords must be N x d")
        self.coords = coords
        self.n = coords.shape[0]
        self.workers = workers
        self._tree = cKDTree(coords)

    def _dist_to(self, i: int, ids: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self.coords[ids] - self.coords[i], axis=1)

    def knn(self, point_id: int, k: int) -> List[Tuple[int, float]]:
        """The k nearest neighbors of a point, self excluded.

        Returns (id, distance) pairs sorted by ascending distance, distance
        ties broken by ascending id. A singleton index returns []; otherwise
        k must satisfy 1 <= k <= N-1.
        """
        if self.n == 1:
            return []
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if k >= self.n:
            raise ValueError(f"k={k} must be < N={self.n}")
        kq = min(self.n, k + 1)
        dist, ids = self._tree.query(self.coords[point_id], k=kq)
        dist = np.atleast_1d(dist)
        ids = np.atleast_1d(ids)
        # Any point at the window boundary may have ties beyond the window;
        # refetch the full closed ball in that case.
        cand = ids[ids != point_id]
        cd = self._dist_to(point_id, cand)
        order = np.lexsort((cand, cd))
        cand, cd = cand[order], cd[order]
        boundary = cd[k - 1]
        if dist[-1] <= boundary * (1 + _RADIUS_SLACK):
            ball = np.asarray(
                self._tree.query_ball_point(self.coords[point_id], boundary * (1 + _RADIUS_SLACK) + 1e-300),
                dtype=np.int64,
            )
            cand = ball[ball != point_id]
            cd = self._dist_to(point_id, cand)
            order = np.lexsort((cand, cd))
            cand, cd = cand[order], cd[order]
        return [(int(cand[j]), float(cd[j])) for j in range(k)]

    def knn_arrays(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """k-NN for every point at once: (distances, ids), each N x k.

        Same semantics as knn() row by row; the bulk path exists because the
        contraction loop queries all points every iteration.
        """
        if k < 1 or k >= self.n:
            raise ValueError(f"k={k} must satisfy 1 <= k < N={self.n}")
        kq = min(self.n, k + 1)
        dist, ids = self._tree.query(self.coords, k=kq, workers=self.workers)
        # Recompute distances in numpy and push self (when present) to the end.
        cd = np.linalg.norm(self.coords[ids] - self.coords[:, None, :], axis=2)
        self_mask = ids == np.arange(self.n)[:, None]
        cd[self_mask] = np.inf
        order = np.argsort(ids, axis=1, kind="stable")
        cd = np.take_along_axis(cd, order, axis=1)
        ids_sorted = np.take_along_axis(ids, order, axis=1)
        order2 = np.argsort(cd, axis=1, kind="stable")
        cd = np.take_along_axis(cd, order2, axis=1)
        ids_sorted = np.take_along_axis(ids_sorted, order2, axis=1)
        out_d = cd[:, :k].copy()
        out_i = ids_sorted[:, :k].copy()
        # Rows where ties may extend past the candidate window get the exact
        # per-point treatment. dist[:, -1] is the window's outermost radius.
        window_edge = dist[:, -1]
        suspect = np.flatnonzero(
            (out_d[:, k - 1] * (1 + _RADIUS_SLACK) >= window_edge) & ~np.isinf(out_d[:, k - 1])
        )
        for i in suspect:
            row = self.knn(int(i), k)
            out_i[i] = [p for p, _ in row]
            out_d[i] = [dv for _, dv in row]
        if np.isinf(out_d).any():
            raise AssertionError("knn_arrays produced an incomplete neighbor row")
        return out_d, out_i

    def kth_distance(self, rank: int) -> np.ndarray:
        """Distance from every point to its rank-th nearest neighbor (self
        excluded), as a length-N vector.

        Rank ties do not affect the value, so this skips the id tie-break
        machinery; used for the truncation radius where rank can be large.
        """
        if rank < 1 or rank > self.n - 1:
            raise ValueError(f"rank={rank} must satisfy 1 <= rank <= N-1={self.n - 1}")
        dist, _ = self._tree.query(self.coords, k=rank + 1, workers=self.workers)
        # Self sits at distance 0 inside the window (or the whole window is
        # zeros when duplicates crowd it out), so column `rank` is the
        # rank-th non-self distance either way.
        return dist[:, rank].copy()

    def count_within(self, point_id: int, radius: float) -> int:
        """Number of other points at distance <= radius (boundary inclusive)."""
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        ball = np.asarray(
            self._tree.query_ball_point(self.coords[point_id], radius * (1 + _RADIUS_SLACK)),
            dtype=np.int64,
        )
        ball = ball[ball != point_id]
        if len(ball) == 0:
            return 0
        return int(np.count_nonzero(self._dist_to(point_id, ball) <= radius))

    def count_within_all(self, radius: float) -> np.ndarray:
        """count_within for every point, as a length-N integer vector."""
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        balls = self._tree.query_ball_point(self.coords, radius * (1 + _RADIUS_SLACK), workers=self.workers)
        counts = np.empty(self.n, dtype=np.int64)
        for i, ball in enumerate(balls):
            ids = np.asarray(ball, dtype=np.int64)
            ids = ids[ids != i]
            if len(ids) == 0:
                counts[i] = 0
            else:
                counts[i] = np.count_nonzero(self._dist_to(i, ids) <= radius)
        return counts

    def nearest_distance(self, point_id: int) -> float:
        """Distance to the nearest other point; 0 when a duplicate exists."""
        if self.n < 2:
            raise ValueError("nearest_distance needs N >= 2")
        return self.knn(point_id, 1)[0][1]

    def nearest_distances(self) -> np.ndarray:
        """nearest_distance for every point."""
        if self.n < 2:
            raise ValueError("nearest_distances needs N >= 2")
        d, _ = self.knn_arrays(1)
        return d[:, 0]


def build(ps) -> NeighborIndex:
    """Index a PointSet's current coordinates."""
    return NeighborIndex(ps.coords)
