"""Truncation radius, local densities and the low-density point set.

Densities are computed once, on the initial (typically standardized)
coordinates, and are never revised during contraction: group membership is
decided at initialization and the high-density core stays fixed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .neighbors import NeighborIndex

# Fraction of N giving the neighbor rank behind the truncation radius.
NEIGHBOR_FRACTION = 0.015


def neighbor_rank(n: int) -> int:
    """Rank of the neighbor whose distance defines each point's radius term:
    ceil of 1.5% of N, clamped to at least 1."""
    return max(1, math.ceil(NEIGHBOR_FRACTION * n))


def truncation_radius(ix: NeighborIndex) -> float:
    """Mean over all points of the distance to their rank-th nearest neighbor."""
    n = ix.n
    if n < 2:
        raise ValueError("truncation radius needs N >= 2")
    rank = neighbor_rank(n)
    r = float(ix.kth_distance(rank).mean())
    if r <= 0.0:
        raise ValueError("degenerate data: truncation radius is zero (all points coincide)")
    return r


def local_density(ix: NeighborIndex, point_id: int, radius: float) -> int:
    """Number of other points within `radius`, boundary inclusive."""
    return ix.count_within(point_id, radius)


def density_lower_bound(densities: np.ndarray) -> float:
    """Arithmetic mean of the density vector, kept as a real."""
    densities = np.asarray(densities)
    if densities.size == 0:
        raise ValueError("empty density vector")
    return float(densities.mean())


def low_density_set(densities: np.ndarray, bound: float) -> np.ndarray:
    """Ids with 0 < density < bound (both strict), sorted ascending."""
    densities = np.asarray(densities)
    return np.flatnonzero((densities > 0) & (densities < bound))


@dataclass(frozen=True)
class DensityProfile:
    """Radius, per-point densities, their mean and the low-density ids.

    Points split three ways: zero-density outliers (stationary, never
    grouped), low-density ids (group seeds) and the high-density rest.
    """

    radius: float
    densities: np.ndarray
    density_mean: float
    low_density_ids: np.ndarray
    rank: int

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "rank": self.rank,
            "density_mean": self.density_mean,
            "densities": self.densities.tolist(),
            "low_density_ids": self.low_density_ids.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def compute_density_profile(ix: NeighborIndex) -> DensityProfile:
    """Full density pass: radius, counts, mean and low-density membership."""
    n = ix.n
    r = truncation_radius(ix)
    rho = ix.count_within_all(r)
    bound = density_lower_bound(rho)
    low = low_density_set(rho, bound)
    return DensityProfile(radius=r, densities=rho, density_mean=bound, low_density_ids=low, rank=neighbor_rank(n))
