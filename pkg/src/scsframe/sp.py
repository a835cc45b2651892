"""Shortest path on positive-weight undirected graphs, sampled by local search.

Local search runs on the relaxed complete graph whose non-edges cost
``lam`` times the true shortest distance. With ``lam > 1`` every local
optimum on the relaxed graph uses only original edges.
"""
import heapq
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _pykernels, kernels
from ._seeds import as_seed

DEFAULT_LAMBDA = 1.1
RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    n: int
    edges: np.ndarray
    weights: np.ndarray
    s: int
    t: int
    coords: np.ndarray | None = None
    kind: str = "graph"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        if len(edges) != len(weights):
            raise ValueError("edges and weights differ in length")
        if self.s == self.t:
            raise ValueError("source and sink must differ")
        if not (0 <= self.s < self.n and 0 <= self.t < self.n):
            raise ValueError("source/sink out of range")
        if len(edges):
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            key = np.sort(edges, axis=1)
            if len(np.unique(key, axis=0)) != len(key):
                raise ValueError("parallel edges are not allowed")
        if np.any(~(weights > 0)):
            raise ValueError("edge weights must be positive")

    @cached_property
    def weight_matrix(self):
        w = np.full((self.n, self.n), np.inf)
        np.fill_diagonal(w, 0.0)
        u, v = self.edges[:, 0], self.edges[:, 1]
        w[u, v] = self.weights
        w[v, u] = self.weights
        return w

    @cached_property
    def adjacency(self):
        """CSR (indptr, indices) with each neighbour list sorted."""
        u = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        v = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, u + 1, 1)
        return np.cumsum(indptr), v.astype(np.int64)

    def neighbors(self, v):
        indptr, indices = self.adjacency
        return indices[indptr[v]:indptr[v + 1]]

    @cached_property
    def edge_set(self):
        return frozenset((int(min(a, b)), int(max(a, b))) for a, b in self.edges)

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.edge_set


@dataclass(frozen=True, eq=False)
class AllPairsTables:
    dist: np.ndarray
    next_hop: np.ndarray

    def path(self, u, v):
        if self.next_hop[u, v] < 0:
            raise ValueError(f"no path between {u} and {v}")
        out = [int(u)]
        while u != v:
            u = int(self.next_hop[u, v])
            out.append(u)
        return out


@dataclass(frozen=True, eq=False)
class RelaxedGraph:
    weights: np.ndarray
    lam: float
    dist: np.ndarray | None = None


def floyd_warshall(g):
    dist, nxt = kernels.floyd_warshall(g.weight_matrix)
    bad = np.argwhere(~np.isfinite(dist))
    if len(bad):
        u, v = bad[0]
        raise ValueError(f"graph is disconnected: {u} cannot reach {v}")
    return AllPairsTables(dist, nxt)


def dijkstra(g, source):
    """Single-source distances and predecessors (-1 for source/unreached)."""
    indptr, indices = g.adjacency
    w = g.weight_matrix
    dist = np.full(g.n, np.inf)
    pred = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0.0
    done = np.zeros(g.n, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v in indices[indptr[u]:indptr[u + 1]]:
            nd = d + w[u, v]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, int(v)))
    return dist, pred


def build_relaxed(g, tables, lam=DEFAULT_LAMBDA):
    if not lam > 1:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    w = g.weight_matrix
    wp = np.where(np.isfinite(w), w, lam * tables.dist)
    return RelaxedGraph(wp, float(lam), tables.dist)


def path_length(p, weights):
    weights = np.asarray(weights)
    p = np.asarray(p, dtype=np.int64)
    return float(sum(weights[a, b] for a, b in zip(p[:-1], p[1:])))


def remove_cycles(walk):
    return _pykernels._remove_cycles([int(v) for v in walk])


def sp_initial(g, tables, rng=None):
    """Random walk towards t that strictly decreases the distance to t each step."""
    indptr, indices = g.adjacency
    gen = _pykernels.SplitMix64(as_seed(rng))
    return _pykernels.sp_initial(
        indptr.tolist(), indices.tolist(), tables.dist[:, g.t].tolist(), g.s, g.t, gen
    )


def _neighbor_index(p, n):
    k = len(p) - 1
    n1 = k - 1
    n2 = n1 + (k - 1) * n
    return n1, n2, n2 + k * n


def _decode_neighbor(p, x, n, w):
    """Return (walk, delta) for neighbour index x, or None if x is not a member."""
    n1, n2, _ = _neighbor_index(p, n)
    if x < n1:
        l = x + 1
        a, b, c = p[l - 1], p[l], p[l + 1]
        return p[:l] + p[l + 1:], w[a, c] - w[a, b] - w[b, c]
    if x < n2:
        l, u = divmod(x - n1, n)
        l += 1
        a, b, c = p[l - 1], p[l], p[l + 1]
        if u in (a, b, c):
            return None
        return p[:l] + [u] + p[l + 1:], w[u, a] + w[u, c] - w[a, b] - w[b, c]
    l, u = divmod(x - n2, n)
    l += 1
    a, c = p[l - 1], p[l]
    if u in (a, c):
        return None
    return p[:l] + [u] + p[l:], w[u, a] + w[u, c] - w[a, c]


def sp_neighbors(p, rg, rng=None):
    """Yield (walk, weight delta) for every deletion, replacement and insertion neighbour.

    Walks may revisit vertices. With ``rng`` the order is a seeded random
    permutation; without it, deletions, replacements, insertions in turn.
    """
    p = [int(v) for v in p]
    w = rg.weights
    n = w.shape[0]
    _, _, m = _neighbor_index(p, n)
    if rng is None:
        order = range(m)
    else:
        order = _pykernels._LazyPerm(m, _pykernels.SplitMix64(as_seed(rng)))
    for x in order:
        got = _decode_neighbor(p, x, n, w)
        if got is not None:
            yield got


def improving_neighbors(p, rg, rtol=RTOL):
    cur = path_length(p, rg.weights)
    return [(q, d) for q, d in sp_neighbors(p, rg) if d < -rtol * cur]


def is_local_optimum(p, rg, rtol=RTOL):
    """Exhaustive vectorised scan of all deletion, replacement and insertion moves."""
    w = rg.weights
    p = np.asarray(p, dtype=np.int64)
    cur = path_length(p, w)
    thr = -rtol * cur
    n = w.shape[0]
    if len(p) > 2:
        a, b, c = p[:-2], p[1:-1], p[2:]
        if np.any(w[a, c] - w[a, b] - w[b, c] < thr):
            return False
        for a_, b_, c_ in zip(a, b, c):
            delta = w[:, a_] + w[:, c_] - w[a_, b_] - w[b_, c_]
            delta[[a_, b_, c_]] = np.inf
            if np.any(delta < thr):
                return False
    for a_, c_ in zip(p[:-1], p[1:]):
        delta = w[:, a_] + w[:, c_] - w[a_, c_]
        delta[[a_, c_]] = np.inf
        if np.any(delta < thr):
            return False
    return True


def sp_local_search(rg, g, rng=None, init=None, trace=False, tables=None):
    """First-improvement descent on the relaxed graph; returns a simple s-t path of g.

    A local optimum that still crosses a non-edge of g (possible when some
    edge is heavier than its shortest detour) has that hop expanded along
    the shortest path and the descent continues.
    """
    indptr, indices = g.adjacency
    tables = tables or floyd_warshall(g)
    return kernels.sp_search(
        indptr, indices, np.ascontiguousarray(tables.dist[:, g.t]), rg.weights,
        g.s, g.t, as_seed(rng), init=init, rtol=RTOL, trace=trace, nxt=tables.next_hop,
    )


def is_simple_path_on(p, g):
    p = [int(v) for v in p]
    if len(p) < 2 or p[0] != g.s or p[-1] != g.t or len(set(p)) != len(p):
        return False
    return all(g.has_edge(a, b) for a, b in zip(p, p[1:]))


class SpProblem:
    """Shortest-path sampler bundle: graph, all-pairs tables and relaxed graph."""

    name = "sp"

    def __init__(self, graph, lam=DEFAULT_LAMBDA):
        self.graph = graph
        self.tables = floyd_warshall(graph)
        self.relaxed = build_relaxed(graph, self.tables, lam)
        self.dist_to_t = np.ascontiguousarray(self.tables.dist[:, graph.t])
        self._indptr, self._indices = graph.adjacency

    def sample(self, seed, init=None, trace=False):
        return kernels.sp_search(
            self._indptr, self._indices, self.dist_to_t, self.relaxed.weights,
            self.graph.s, self.graph.t, as_seed(seed), init=init, rtol=RTOL, trace=trace,
            nxt=self.tables.next_hop,
        )

    def element_set(self, path):
        return frozenset(
            (int(min(a, b)), int(max(a, b))) for a, b in zip(path[:-1], path[1:])
        )

    def objective(self, path):
        return path_length(path, self.graph.weight_matrix)

    def is_local_optimum(self, path):
        return is_local_optimum(list(path), self.relaxed)

    def is_feasible(self, path):
        return is_simple_path_on(path, self.graph)
