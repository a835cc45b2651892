"""Comparison algorithms: multi-start local search and Yen's k shortest paths."""
import heapq
from dataclasses import dataclass

import numpy as np

from ._seeds import run_seed
from .sp import floyd_warshall, is_local_optimum, path_length, sp_local_search

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class BaselineBudget:
    n_s: int
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.n_s < 1:
            raise ValueError("n_s must be at least 1")
        if self.cap < self.n_s:
            raise ValueError("iteration cap must be at least n_s")


def msls(problem, budget, seed=0, prefix=None):
    """First ``n_s`` distinct local optima from repeated sampler runs.

    Run ``i`` uses the same per-run seed as the i-th SCS sample, so a
    ``prefix`` of already-sampled solutions can be reused.
    """
    out = []
    seen = set()
    prefix = list(prefix) if prefix is not None else []
    for i in range(budget.cap):
        sol = prefix[i] if i < len(prefix) else problem.sample(run_seed(seed, i))
        key = problem.element_set(sol)
        if key in seen:
            continue
        seen.add(key)
        out.append(sol)
        if len(out) >= budget.n_s:
            break
    return out


def _dist_to(g, target, banned_v, banned_e):
    indptr, indices = g.adjacency
    w = g.weight_matrix
    dist = np.full(g.n, np.inf)
    dist[target] = 0.0
    heap = [(0.0, target)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in indices[indptr[u]:indptr[u + 1]].tolist():
            if v in banned_v or (u, v) in banned_e:
                continue
            nd = d + w[u, v]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def lex_shortest_path(g, src, dst, banned_v=frozenset(), banned_e=frozenset()):
    """Lexicographically smallest among the shortest src-dst paths avoiding the bans."""
    if src in banned_v:
        return None
    dist = _dist_to(g, dst, banned_v, banned_e)
    if not np.isfinite(dist[src]):
        return None
    indptr, indices = g.adjacency
    w = g.weight_matrix
    path = [src]
    u = src
    while u != dst:
        tol = 1e-12 * max(1.0, dist[u])
        nxt = None
        for v in indices[indptr[u]:indptr[u + 1]].tolist():
            if v in banned_v or (u, v) in banned_e or v in path:
                continue
            if w[u, v] + dist[v] <= dist[u] + tol:
                nxt = v
                break
        if nxt is None:
            return None
        path.append(nxt)
        u = nxt
    return path


def yen_paths(g):
    """Loopless s-t paths in nondecreasing weight, ties in lexicographic order."""
    first = lex_shortest_path(g, g.s, g.t)
    if first is None:
        raise ValueError(f"sink {g.t} unreachable from source {g.s}")
    w = g.weight_matrix
    accepted = [first]
    seen = {tuple(first)}
    heap = []
    yield first
    while True:
        prev = accepted[-1]
        for i in range(len(prev) - 1):
            spur = prev[i]
            root = prev[:i + 1]
            banned_e = set()
            for p in accepted:
                if p[:i + 1] == root and len(p) > i + 1:
                    banned_e.add((p[i], p[i + 1]))
                    banned_e.add((p[i + 1], p[i]))
            spur_path = lex_shortest_path(g, spur, g.t, frozenset(root[:-1]), banned_e)
            if spur_path is None:
                continue
            total = tuple(root[:-1] + spur_path)
            if total not in seen:
                seen.add(total)
                heapq.heappush(heap, (path_length(total, w), total))
        if not heap:
            return
        _, best = heapq.heappop(heap)
        best = list(best)
        accepted.append(best)
        yield best


def yen_k_shortest(g, budget):
    out = []
    for it, p in enumerate(yen_paths(g)):
        if it >= budget.cap:
            break
        out.append(p)
        if len(out) >= budget.n_s:
            break
    return out


def yen_ls(g, relaxed, budget, mode="filter", seed=0):
    """Yen enumeration keeping only paths that are local optima on the relaxed graph.

    ``mode='transform'`` instead runs local search from each Yen path and
    keeps the distinct results.
    """
    if mode not in ("filter", "transform"):
        raise ValueError(f"unknown mode {mode!r}")
    out = []
    seen = set()
    tables = floyd_warshall(g) if mode == "transform" else None
    for it, p in enumerate(yen_paths(g)):
        if it >= budget.cap:
            break
        if mode == "filter":
            if not is_local_optimum(p, relaxed):
                continue
            q = p
        else:
            q = [int(v) for v in sp_local_search(relaxed, g, run_seed(seed, it), init=p, tables=tables)]
        key = tuple(q)
        if key in seen:
            continue
        seen.add(key)
        out.append(q)
        if len(out) >= budget.n_s:
            break
    return out
