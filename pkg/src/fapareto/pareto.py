"""Pareto ranking, NSGA-II style fitness, selection and the run archive."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import dominance_ranks
from .metrics import ObjectivePoint
from .model import ParamVector


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def _as_array(points):
    F = np.asarray([tuple(p) for p in points], dtype=np.float64)
    return F.reshape(len(points), -1)


def nondominated_sort(points) -> list[list[int]]:
    """Fronts of indices; inside a front, indices keep their input order."""
    if len(points) == 0:
        raise ValueError("nondominated_sort needs at least one point")
    ranks = dominance_ranks(_as_array(points))
    fronts = [[] for _ in range(int(ranks.max()) + 1)]
    for i, r in enumerate(ranks):
        fronts[r].append(i)
    return fronts


def crowding_distance(front_points) -> list[float]:
    n = len(front_points)
    if n == 0:
        raise ValueError("crowding_distance needs at least one point")
    if n <= 2:
        return [math.inf] * n
    F = _as_array(front_points)
    dist = np.zeros(n)
    for k in range(F.shape[1]):
        order = np.argsort(F[:, k], kind="stable")
        col = F[order, k]
        span = col[-1] - col[0]
        dist[order[0]] = math.inf
        dist[order[-1]] = math.inf
        if span == 0:
            continue
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist.tolist()


@dataclass(eq=False)
class Individual:
    id: int
    params: ParamVector
    objectives: ObjectivePoint | None = None
    rank: int | None = None
    crowding: float | None = None
    test_objectives: ObjectivePoint | None = None
    generation: int = 0

    @property
    def fitness(self):
        if self.rank is None:
            raise ValueError(f"individual {self.id} has no fitness assigned")
        return (self.rank, self.crowding)

    def sort_key(self):
        """Smaller is better: rank, then wider crowding, then older id."""
        rank, crowding = self.fitness
        return (rank, -crowding, self.id)


def better(a: Individual, b: Individual) -> bool:
    return a.sort_key() < b.sort_key()


def assign_fitness(pop: list[Individual]) -> list[Individual]:
    """Set (front rank, crowding within front) on every individual, in place."""
    for ind in pop:
        if ind.objectives is None:
            raise ValueError(f"individual {ind.id} has no objectives")
    fronts = nondominated_sort([ind.objectives for ind in pop])
    for r, front in enumerate(fronts):
        dist = crowding_distance([pop[i].objectives for i in front])
        for i, c in zip(front, dist):
            pop[i].rank = r
            pop[i].crowding = c
    return pop


def mating_pool(pop: list[Individual], k: int | None = None, seed=0) -> list[Individual]:
    """``k`` binary-tournament winners; contestants drawn with replacement."""
    if not pop:
        raise ValueError("mating_pool needs a nonempty population")
    k = len(pop) if k is None else k
    if k < 2:
        raise ValueError(f"pool size must be >= 2, got {k}")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(pop), size=(k, 2))
    return [pop[a] if better(pop[a], pop[b]) or a == b else pop[b] for a, b in picks]


def pareto_selection(union: list[Individual], target: int) -> list[Individual]:
    """Fill by whole fronts, truncating the last one by crowding."""
    if len(union) < target:
        raise ValueError(f"cannot select {target} from {len(union)} individuals")
    fronts = nondominated_sort([ind.objectives for ind in union])
    chosen = []
    for front in fronts:
        members = [union[i] for i in front]
        if len(chosen) + len(members) <= target:
            chosen.extend(members)
            continue
        dist = crowding_distance([m.objectives for m in members])
        for m, c in zip(members, dist):
            m.crowding = c
        members.sort(key=lambda m: (-m.crowding, m.id))
        chosen.extend(members[: target - len(chosen)])
        break
    return chosen


@dataclass(frozen=True)
class ArchiveEntry:
    id: int
    objectives: ObjectivePoint
    params: ParamVector | None = None


@dataclass
class Archive:
    """Mutually non-dominated set of every solution seen so far."""

    entries: list[ArchiveEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def points(self):
        return [e.objectives for e in self.entries]

    def ids(self):
        return [e.id for e in self.entries]

    def copy(self):
        return Archive(list(self.entries))


def update_archive(ar: Archive, newcomers) -> Archive:
    """Insert newcomers in order; returns a new archive, ``ar`` is untouched."""
    entries = list(ar.entries)
    for ind in newcomers:
        obj = ind.objectives
        if obj is None:
            raise ValueError(f"individual {ind.id} has no objectives")
        obj = ObjectivePoint(*obj)
        if any(dominates(e.objectives, obj) or tuple(e.objectives) == tuple(obj) for e in entries):
            continue
        entries = [e for e in entries if not dominates(obj, e.objectives)]
        entries.append(ArchiveEntry(ind.id, obj, getattr(ind, "params", None)))
    return Archive(entries)
