"""Micro-clustering of sampled solutions.

Solutions become vertices; pairs closer than a quantile threshold are
joined. The graph is then polished (edges re-derived from neighbourhood
resemblance until nothing changes) and clusters are read off as maximal
cliques, which may overlap.
"""
import math
from dataclasses import dataclass

import numpy as np

MAX_CLIQUES = 10**6


@dataclass(frozen=True, eq=False)
class SolutionGraph:
    adj: np.ndarray

    @property
    def n(self):
        return self.adj.shape[0]

    def edges(self):
        u, v = np.nonzero(np.triu(self.adj, k=1))
        return list(zip(u.tolist(), v.tolist()))

    def same_as(self, other):
        return np.array_equal(self.adj, other.adj)

    @classmethod
    def from_edges(cls, n, edges):
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u != v:
                adj[u, v] = adj[v, u] = True
        return cls(adj)


@dataclass(frozen=True)
class ClusterParams:
    delta: float = 0.1
    theta: float = 0.15
    min_size: int = 5
    max_reps: int = 99


def quantile_threshold(matrix, delta):
    """The ceil(delta * n_plus)-th smallest non-zero pairwise dissimilarity."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    matrix = np.asarray(matrix, dtype=float)
    vals = matrix[np.triu_indices(matrix.shape[0], k=1)]
    vals = np.sort(vals[vals > 0])
    if len(vals) == 0:
        raise ValueError("no dissimilar pairs to threshold")
    # round before ceil: 0.1 * 30 must give 3, not 4
    rank = max(1, math.ceil(round(delta * len(vals), 9)))
    return float(vals[rank - 1])


def build_adjacency(matrix, delta):
    matrix = np.asarray(matrix, dtype=float)
    tau = quantile_threshold(matrix, delta)
    adj = matrix <= tau
    np.fill_diagonal(adj, False)
    return SolutionGraph(adj)


def _closed(adj):
    a = adj.astype(np.float64)
    np.fill_diagonal(a, 1.0)
    return a


def resemblance(graph, u, v):
    """Jaccard similarity of the closed neighbourhoods of u and v."""
    nu = set(np.flatnonzero(graph.adj[u]).tolist()) | {u}
    nv = set(np.flatnonzero(graph.adj[v]).tolist()) | {v}
    return len(nu & nv) / len(nu | nv)


def resemblance_matrix(graph):
    a = _closed(graph.adj)
    inter = a @ a
    deg = a.sum(axis=1)
    union = deg[:, None] + deg[None, :] - inter
    return inter / union


def polish_step(graph, theta):
    adj = resemblance_matrix(graph) >= theta
    np.fill_diagonal(adj, False)
    return SolutionGraph(adj)


def data_polish(graph, theta=0.15, max_reps=99):
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if max_reps < 1:
        raise ValueError("max_reps must be at least 1")
    g = graph
    for _ in range(max_reps):
        nxt = polish_step(g, theta)
        if nxt.same_as(g):
            break
        g = nxt
    return g


def degeneracy_order(adj):
    n = adj.shape[0]
    deg = adj.sum(axis=1).astype(np.int64)
    alive = np.ones(n, dtype=bool)
    order = []
    for _ in range(n):
        cand = np.where(alive, deg, np.iinfo(np.int64).max)
        v = int(np.argmin(cand))
        order.append(v)
        alive[v] = False
        deg[adj[v] & alive] -= 1
    return order


def _bits(adj):
    out = []
    for row in adj:
        b = 0
        for j in np.flatnonzero(row).tolist():
            b |= 1 << j
        out.append(b)
    return out


def _iter_bits(x):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _pivot_cands(nb, p, x):
    best, best_cnt = 0, -1
    for u in _iter_bits(p | x):
        cnt = (p & nb[u]).bit_count()
        if cnt > best_cnt:
            best, best_cnt = u, cnt
    return p & ~nb[best]


def maximal_cliques(graph, min_size=1, cap=MAX_CLIQUES):
    """All maximal cliques with at least ``min_size`` vertices, largest first."""
    if min_size < 1:
        raise ValueError("min_size must be at least 1")
    adj = graph.adj
    nb = _bits(adj)
    out = []
    before = 0
    for v in degeneracy_order(adj):
        vb = 1 << v
        p0 = nb[v] & ~before
        x0 = nb[v] & before
        before |= vb
        if 1 + p0.bit_count() < min_size:
            continue
        if not p0 and not x0:
            out.append((v,))
            continue
        if not p0:
            continue
        stack = [((v,), p0, x0, _pivot_cands(nb, p0, x0))]
        while stack:
            r, p, x, cand = stack[-1]
            if not cand:
                stack.pop()
                continue
            u = (cand & -cand).bit_length() - 1
            ub = 1 << u
            stack[-1] = (r, p & ~ub, x | ub, cand & ~ub)
            np_, nx = p & nb[u], x & nb[u]
            nr = r + (u,)
            if not np_:
                if not nx and len(nr) >= min_size:
                    out.append(nr)
                    if len(out) > cap:
                        raise RuntimeError(f"clique enumeration exceeded {cap} cliques")
                continue
            if len(nr) + np_.bit_count() < min_size:
                continue
            stack.append((nr, np_, nx, _pivot_cands(nb, np_, nx)))
    cliques = [tuple(sorted(c)) for c in out]
    cliques.sort(key=lambda c: (-len(c), c))
    return cliques


def micro_cluster(matrix, params=None, **kw):
    """Quantile adjacency, then polishing, then maximal cliques."""
    params = params or ClusterParams(**kw)
    g = build_adjacency(matrix, params.delta)
    g = data_polish(g, params.theta, params.max_reps)
    return maximal_cliques(g, params.min_size)
