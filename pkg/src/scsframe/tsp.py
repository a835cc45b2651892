"""Euclidean TSP with a first-improvement 2-opt sampler."""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from ._pykernels import two_opt_moves
from ._seeds import as_seed

RTOL = 1e-12
DECIMALS = 6


def rounded_distances(points, decimals=DECIMALS):
    diff = points[:, None, :] - points[None, :, :]
    return np.round(np.sqrt((diff ** 2).sum(axis=2)), decimals)


@dataclass(frozen=True, eq=False)
class TspInstance:
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.round(np.asarray(self.points, dtype=np.float64).reshape(-1, 2), DECIMALS)
        object.__setattr__(self, "points", pts)
        if len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("duplicate points")

    @property
    def n(self):
        return len(self.points)

    @cached_property
    def dist(self):
        return rounded_distances(self.points)


def tour_length(tour, inst):
    d = inst.dist if isinstance(inst, TspInstance) else np.asarray(inst)
    tour = np.asarray(tour, dtype=np.int64)
    return float(sum(d[a, b] for a, b in zip(tour, np.roll(tour, -1))))


def tour_edge_set(tour):
    tour = [int(v) for v in tour]
    return frozenset((min(a, b), max(a, b)) for a, b in zip(tour, tour[1:] + tour[:1]))


def is_valid_tour(tour, n):
    tour = np.asarray(tour)
    return len(tour) == n and np.array_equal(np.sort(tour), np.arange(n))


def tsp_local_search(inst, rng=None, init=None, trace=False):
    """Random initial permutation, then 2-opt first improvement in seeded scan order."""
    if inst.n < 4:
        raise ValueError("2-opt needs at least 4 vertices")
    return kernels.tsp_search(inst.dist, as_seed(rng), init=init, rtol=RTOL, trace=trace)


def two_opt_deltas(tour, d):
    """Length change of every non-degenerate segment reversal, by brute force."""
    tour = np.asarray(tour, dtype=np.int64)
    n = len(tour)
    out = []
    for i, j in two_opt_moves(n):
        a, b, c, e = tour[i], tour[i + 1], tour[j], tour[(j + 1) % n]
        out.append(d[a, c] + d[b, e] - d[a, b] - d[c, e])
    return np.asarray(out)


def is_two_opt_optimal(tour, inst, rtol=RTOL):
    d = inst.dist
    deltas = two_opt_deltas(tour, d)
    return not np.any(deltas < -rtol * tour_length(tour, d))


class TspProblem:
    name = "tsp"

    def __init__(self, inst):
        self.inst = inst

    def sample(self, seed, init=None, trace=False):
        return tsp_local_search(self.inst, seed, init=init, trace=trace)

    def element_set(self, tour):
        return tour_edge_set(tour)

    def objective(self, tour):
        return tour_length(tour, self.inst)

    def is_local_optimum(self, tour):
        return is_two_opt_optimal(tour, self.inst)

    def is_feasible(self, tour):
        return is_valid_tour(tour, self.inst.n)
