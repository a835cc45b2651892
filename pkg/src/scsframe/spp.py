"""Rectangle set packing on an n1 x n2 grid, sampled by add/swap local search.

Cells are numbered ``x * n2 + y`` for 0-based row ``x`` and column ``y``.
A rectangle is stored as inclusive bounds ``(a1, b1, a2, b2)`` over rows
and columns.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _pykernels, kernels
from ._seeds import as_seed


def rect_cells(rect, n2):
    a1, b1, a2, b2 = (int(v) for v in rect)
    return [x * n2 + y for x in range(a1, b1 + 1) for y in range(a2, b2 + 1)]


def is_rectangle_set(cells, n1, n2):
    """True if ``cells`` is exactly the set of grid cells inside some axis-aligned box."""
    cells = set(int(c) for c in cells)
    if not cells:
        return False
    xs = [c // n2 for c in cells]
    ys = [c % n2 for c in cells]
    if min(xs) < 0 or max(xs) >= n1:
        return False
    box = (min(xs), max(xs), min(ys), max(ys))
    return cells == set(rect_cells(box, n2))


@dataclass(frozen=True, eq=False)
class SppInstance:
    n1: int
    n2: int
    rects: np.ndarray
    costs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        rects = np.asarray(self.rects, dtype=np.int64).reshape(-1, 4)
        costs = np.asarray(self.costs, dtype=np.int64).reshape(-1)
        object.__setattr__(self, "rects", rects)
        object.__setattr__(self, "costs", costs)
        if len(rects) != len(costs):
            raise ValueError("rects and costs differ in length")
        if np.any(costs < 1):
            raise ValueError("costs must be positive integers")
        a1, b1, a2, b2 = rects.T
        if np.any((a1 < 0) | (a1 > b1) | (b1 >= self.n1) | (a2 < 0) | (a2 > b2) | (b2 >= self.n2)):
            raise ValueError("rectangle out of grid bounds")
        if len({tuple(r) for r in rects.tolist()}) != len(rects):
            raise ValueError("duplicate rectangle sets")

    @property
    def m(self):
        return len(self.rects)

    @property
    def n_cells(self):
        return self.n1 * self.n2

    @cached_property
    def cells(self):
        return [rect_cells(r, self.n2) for r in self.rects]

    @cached_property
    def csr(self):
        ptr = np.zeros(self.m + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(c) for c in self.cells])
        flat = np.fromiter((c for cs in self.cells for c in cs), dtype=np.int64, count=int(ptr[-1]))
        return ptr, flat


def is_packing(candidate, inst):
    seen = set()
    for j in candidate:
        for c in inst.cells[int(j)]:
            if c in seen:
                return False
            seen.add(c)
    return True


def packing_weight(p, inst):
    return int(sum(int(inst.costs[int(j)]) for j in p))


def occupancy(p, inst):
    grid = np.zeros(inst.n_cells, dtype=np.int64)
    for j in p:
        grid[inst.cells[int(j)]] += 1
    return grid.reshape(inst.n1, inst.n2)


def spp_neighbors(p, inst, rng=None):
    """Yield (neighbour packing, weight delta) for every feasible add and swap.

    Added sets are drawn from the sets not already chosen. Order follows the
    sampler's index space: additions then swaps, permuted when ``rng`` is given.
    """
    chosen = sorted(int(j) for j in p)
    cset = set(chosen)
    owner = {}
    for j in chosen:
        for c in inst.cells[j]:
            owner[c] = j
    m = inst.m
    total = m + len(chosen) * m
    if rng is None:
        order = range(total)
    else:
        order = _pykernels._LazyPerm(total, _pykernels.SplitMix64(as_seed(rng)))
    for x in order:
        if x < m:
            j = x
            if j in cset or any(c in owner for c in inst.cells[j]):
                continue
            yield frozenset(cset | {j}), int(inst.costs[j])
        else:
            i = chosen[(x - m) // m]
            j = (x - m) % m
            if j in cset or any(owner.get(c, i) != i for c in inst.cells[j]):
                continue
            yield frozenset((cset - {i}) | {j}), int(inst.costs[j] - inst.costs[i])


def is_spp_local_optimum(p, inst):
    return not any(delta > 0 for _, delta in spp_neighbors(p, inst))


def spp_local_search(inst, rng=None, init=None, trace=False):
    """Start from the empty packing (or ``init``) and climb by first improvement."""
    ptr, flat = inst.csr
    return kernels.spp_search(ptr, flat, inst.costs, inst.n_cells, as_seed(rng), init=init, trace=trace)


def packing_element_view(p, inst=None, view="sets"):
    """Element set used for Jaccard: chosen set indices, or covered cells with view='cells'."""
    if view == "sets":
        return frozenset(int(j) for j in p)
    if view == "cells":
        if inst is None:
            raise ValueError("cell view needs the instance")
        return frozenset(c for j in p for c in inst.cells[int(j)])
    raise ValueError(f"unknown view {view!r}")


class SppProblem:
    name = "spp"

    def __init__(self, inst, view="sets"):
        self.inst = inst
        self.view = view

    def sample(self, seed, init=None, trace=False):
        return spp_local_search(self.inst, seed, init=init, trace=trace)

    def element_set(self, packing):
        return packing_element_view(packing, self.inst, self.view)

    def objective(self, packing):
        return packing_weight(packing, self.inst)

    def is_local_optimum(self, packing):
        return is_spp_local_optimum(packing, self.inst)

    def is_feasible(self, packing):
        return is_packing(packing, self.inst)
