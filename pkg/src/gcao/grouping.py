"""Collaboratively moving groups around low-density seed points.

The default construction gives every low-density point its own group: the
seed plus the neighbors it claims, with contested claims settled by a k-NN
majority (see seed_groups). The module also carries the merged alternative,
where the k-NN graph over the low-density set is symmetrized, its connected
components become multi-seed groups, and members attach to components
(build_low_density_adjacency / connected_groups / attach_members). Either
way the partition is built once and never revised during contraction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .density import DensityProfile
from .neighbors import NeighborIndex


@dataclass(frozen=True)
class Group:
    """One moving unit: seed ids (low-density) plus attached member ids."""

    group_id: int
    seeds: frozenset
    members: frozenset

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("a group needs at least one seed")
        if self.seeds & self.members:
            raise ValueError("seeds and members must be disjoint")

    @property
    def all(self) -> frozenset:
        return self.seeds | self.members

    @property
    def size(self) -> int:
        return len(self.seeds) + len(self.members)


@dataclass(frozen=True)
class GroupPartition:
    """Disjoint groups plus the point -> group map; ungrouped points are absent."""

    groups: Tuple[Group, ...]
    assignment: Dict[int, int]

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def assignment_array(self, n: int) -> np.ndarray:
        """Length-n vector of group ids, -1 for ungrouped points."""
        out = np.full(n, -1, dtype=np.int64)
        for pid, gid in self.assignment.items():
            out[pid] = gid
        return out

    def to_dict(self) -> dict:
        return {
            "groups": [
                {
                    "group_id": g.group_id,
                    "seeds": sorted(g.seeds),
                    "members": sorted(g.members),
                }
                for g in self.groups
            ]
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _neighbor_lists(ix: NeighborIndex, k: int) -> np.ndarray:
    """Bulk k-NN ids with k clamped to N-1."""
    k_eff = min(k, ix.n - 1)
    _, ids = ix.knn_arrays(k_eff)
    return ids


def build_low_density_adjacency(
    low_ids: Sequence[int],
    ix: NeighborIndex,
    k: int,
    nn_ids: Optional[np.ndarray] = None,
) -> Dict[int, Set[int]]:
    """Symmetrized k-NN graph restricted to the low-density set.

    Edge (i, j) exists iff both are low-density and either appears in the
    other's k-NN list (neighbor lists are over the full point set).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    low = sorted(int(i) for i in low_ids)
    adj: Dict[int, Set[int]] = {i: set() for i in low}
    if len(low) <= 1:
        return adj
    if nn_ids is None:
        nn_ids = _neighbor_lists(ix, k)
    low_set = set(low)
    for i in low:
        for j in nn_ids[i]:
            j = int(j)
            if j in low_set:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def connected_groups(adj: Dict[int, Set[int]]) -> List[List[int]]:
    """Connected components via iterative depth-first search.

    Components are sorted by their smallest id and ids inside each component
    are ascending, so the output is deterministic.
    """
    seen: Set[int] = set()
    components: List[List[int]] = []
    for start in sorted(adj):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = []
        while stack:
            node = stack.pop()
            comp.append(node)
            for nb in sorted(adj[node], reverse=True):
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        components.append(sorted(comp))
    components.sort(key=lambda c: c[0])
    return components


def attach_members(
    seed_groups: Sequence[Sequence[int]],
    low_ids: Sequence[int],
    ix: NeighborIndex,
    k: int,
    profile: DensityProfile,
    nn_ids: Optional[np.ndarray] = None,
) -> GroupPartition:
    """Attach non-seed points claimed by seed neighborhoods.

    A point y with positive density is a candidate for group j when it
    appears in the k-NN list of one of j's seeds. A uniquely claimed
    candidate joins its claimant; a contested one joins the claimant with
    the most seeds among y's own k nearest neighbors. Count ties go to the
    group holding the seed nearest to y, then to the smallest group id.
    """
    low_set = {int(i) for i in low_ids}
    covered = set()
    for comp in seed_groups:
        covered.update(int(i) for i in comp)
    if covered != low_set:
        raise ValueError("seed groups must exactly cover the low-density set")

    if nn_ids is None:
        nn_ids = _neighbor_lists(ix, k)
    densities = profile.densities

    seed_to_group: Dict[int, int] = {}
    for gid, comp in enumerate(seed_groups):
        for s in comp:
            seed_to_group[int(s)] = gid

    # Candidate -> set of group ids whose seeds reach it.
    claims: Dict[int, Set[int]] = {}
    for gid, comp in enumerate(seed_groups):
        for s in comp:
            for nb in nn_ids[int(s)]:
                nb = int(nb)
                if nb in seed_to_group:
                    continue
                if densities[nb] <= 0:
                    continue
                claims.setdefault(nb, set()).add(gid)

    members: Dict[int, Set[int]] = {gid: set() for gid in range(len(seed_groups))}
    for y in sorted(claims):
        claimants = sorted(claims[y])
        if len(claimants) == 1:
            members[claimants[0]].add(y)
            continue
        counts = {gid: 0 for gid in claimants}
        for nb in nn_ids[y]:
            gid = seed_to_group.get(int(nb))
            if gid is not None and gid in counts:
                counts[gid] += 1
        best = max(counts[g] for g in claimants)
        tied = [g for g in claimants if counts[g] == best]
        if len(tied) == 1:
            members[tied[0]].add(y)
            continue
        nearest_gid = None
        nearest_dist = np.inf
        for gid in tied:
            seeds = np.fromiter((s for s in seed_groups[gid]), dtype=np.int64)
            d = float(np.linalg.norm(ix.coords[seeds] - ix.coords[y], axis=1).min())
            if d < nearest_dist:
                nearest_dist = d
                nearest_gid = gid
        members[nearest_gid].add(y)

    groups = []
    assignment: Dict[int, int] = {}
    for gid, comp in enumerate(seed_groups):
        g = Group(group_id=gid, seeds=frozenset(int(i) for i in comp), members=frozenset(members[gid]))
        groups.append(g)
        for pid in g.all:
            assignment[pid] = gid
    return GroupPartition(groups=tuple(groups), assignment=assignment)


def seed_groups(
    ix: NeighborIndex,
    profile: DensityProfile,
    k: int,
    seed_ids: Optional[Sequence[int]] = None,
    nn_ids: Optional[np.ndarray] = None,
) -> GroupPartition:
    """One group per low-density point: the seed plus the neighbors it claims.

    Every seed provisionally claims the non-seed, positive-density points in
    its k-NN list. A point claimed once joins that group; a point claimed by
    several joins the group with the most provisional mates (seed or claims)
    among its own k nearest neighbors. Count ties go to the nearest seed,
    then to the smallest group id. Counting uses the provisional claim sets
    throughout, so the outcome is independent of resolution order.
    """
    low = profile.low_density_ids if seed_ids is None else np.asarray(seed_ids, dtype=np.int64)
    if len(low) == 0:
        return GroupPartition(groups=(), assignment={})
    if nn_ids is None:
        nn_ids = _neighbor_lists(ix, k)
    densities = profile.densities

    gid_of_seed = {int(s): gid for gid, s in enumerate(low)}
    claimed_by: Dict[int, Set[int]] = {}
    for gid, s in enumerate(low):
        for nb in nn_ids[int(s)]:
            nb = int(nb)
            if nb in gid_of_seed or densities[nb] <= 0:
                continue
            claimed_by.setdefault(nb, set()).add(gid)

    members: Dict[int, Set[int]] = {gid: set() for gid in range(len(low))}
    for y in sorted(claimed_by):
        claimants = sorted(claimed_by[y])
        if len(claimants) == 1:
            members[claimants[0]].add(y)
            continue
        counts = {gid: 0 for gid in claimants}
        for nb in nn_ids[y]:
            nb = int(nb)
            nb_gid = gid_of_seed.get(nb)
            if nb_gid is not None:
                if nb_gid in counts:
                    counts[nb_gid] += 1
                continue
            for gid in claimed_by.get(nb, ()):
                if gid in counts:
                    counts[gid] += 1
        best = max(counts[g] for g in claimants)
        tied = [g for g in claimants if counts[g] == best]
        if len(tied) > 1:
            winner = min((float(np.linalg.norm(ix.coords[int(low[g])] - ix.coords[y])), g) for g in tied)[1]
        else:
            winner = tied[0]
        members[winner].add(y)

    groups = []
    assignment: Dict[int, int] = {}
    for gid, s in enumerate(low):
        g = Group(group_id=gid, seeds=frozenset([int(s)]), members=frozenset(members[gid]))
        groups.append(g)
        for pid in g.all:
            assignment[pid] = gid
    return GroupPartition(groups=tuple(groups), assignment=assignment)


def singleton_partition(low_ids: Sequence[int]) -> GroupPartition:
    """One single-seed group per low-density point, no members attached
    (the single-point-force ablation)."""
    groups = []
    assignment: Dict[int, int] = {}
    for gid, pid in enumerate(sorted(int(i) for i in low_ids)):
        groups.append(Group(group_id=gid, seeds=frozenset([pid]), members=frozenset()))
        assignment[pid] = gid
    return GroupPartition(groups=tuple(groups), assignment=assignment)


def build_groups(
    ix: NeighborIndex,
    profile: DensityProfile,
    k: int,
    low_ids: Optional[Sequence[int]] = None,
) -> GroupPartition:
    """Adjacency -> components -> member attachment, sharing one k-NN pass.

    ``low_ids`` overrides the profile's low-density set (the all-points
    ablation passes every positive-density id).
    """
    if low_ids is None:
        low_ids = profile.low_density_ids
    nn_ids = _neighbor_lists(ix, k) if ix.n > 1 else np.empty((ix.n, 0), dtype=np.int64)
    adj = build_low_density_adjacency(low_ids, ix, k, nn_ids=nn_ids)
    comps = connected_groups(adj)
    return attach_members(comps, low_ids, ix, k, profile, nn_ids=nn_ids)
