"""Pure-Python implementations of the hot kernels.

This module is the reference for ``_ckernels.pyx``: both consume the same
splitmix64 stream in the same order, so for a given seed they return
identical paths, tours and packings. Keep the two in lockstep.
"""
import numpy as np
from scipy import sparse

MASK64 = (1 << 64) - 1


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound):
        return self.next() % bound


class _LazyPerm:
    """Fisher-Yates shuffle of range(m) drawn one element at a time."""

    __slots__ = ("m", "r", "swapped", "rng")

    def __init__(self, m, rng):
        self.m = m
        self.r = 0
        self.swapped = {}
        self.rng = rng

    def __iter__(self):
        return self

    def __next__(self):
        r = self.r
        if r >= self.m:
            raise StopIteration
        sw = self.swapped
        j = r + self.rng.below(self.m - r)
        x = sw.get(j, j)
        sw[j] = sw.get(r, r)
        self.r = r + 1
        return x


def _remove_cycles(walk):
    out = []
    pos = {}
    for v in walk:
        if v in pos:
            cut = pos[v] + 1
            for u in out[cut:]:
                del pos[u]
            del out[cut:]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def _walk_len(p, wp):
    return sum(wp[a][b] for a, b in zip(p, p[1:]))


def sp_initial(indptr, indices, dist_t, s, t, rng):
    path = [s]
    v = s
    while v != t:
        dv = dist_t[v]
        cand = [u for u in indices[indptr[v]:indptr[v + 1]] if dist_t[u] < dv]
        if not cand:
            raise ValueError(f"vertex {v} has no neighbour closer to {t}")
        v = cand[rng.below(len(cand))]
        path.append(v)
    return path


def _expand_non_edges(p, adj_sets, nxt):
    """Replace every non-edge hop by its stored shortest path; None if p uses only edges."""
    if all(b in adj_sets[a] for a, b in zip(p, p[1:])):
        return None
    walk = [p[0]]
    for a, b in zip(p, p[1:]):
        if b in adj_sets[a]:
            walk.append(b)
            continue
        v = a
        while v != b:
            v = nxt[v][b]
            walk.append(v)
    return _remove_cycles(walk)


def sp_search(indptr, indices, dist_t, wp, s, t, seed, init=None, rtol=1e-12, trace=False, nxt=None):
    """First-improvement descent over the SP neighbourhood on the relaxed graph.

    With a next-hop table ``nxt``, a local optimum that still uses a
    non-edge has those hops expanded along shortest paths (a strict
    improvement on the relaxed graph) and the descent resumes, so the
    result only uses edges of the graph.
    """
    rng = SplitMix64(seed)
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    dist_t = [float(x) for x in dist_t]
    wp = np.asarray(wp, dtype=float).tolist()
    n = len(dist_t)
    s, t = int(s), int(t)
    if init is None:
        p = sp_initial(indptr, indices, dist_t, s, t, rng)
    else:
        p = _remove_cycles([int(v) for v in init])
    cur = _walk_len(p, wp)
    lengths = [cur]
    if nxt is not None:
        nxt = np.asarray(nxt).tolist()
        adj_sets = [set(indices[indptr[v]:indptr[v + 1]]) for v in range(n)]
    while True:
        k = len(p) - 1
        n1 = k - 1
        n2 = n1 + (k - 1) * n
        m = n2 + k * n
        moved = False
        for x in _LazyPerm(m, rng):
            if x < n1:
                l = x + 1
                a, b, c = p[l - 1], p[l], p[l + 1]
                wa = wp[a]
                delta = wa[c] - wa[b] - wp[b][c]
                q = p[:l] + p[l + 1:]
            elif x < n2:
                off = x - n1
                l = off // n + 1
                u = off % n
                a, b, c = p[l - 1], p[l], p[l + 1]
                if u == a or u == b or u == c:
                    continue
                wu = wp[u]
                delta = wu[a] + wu[c] - wp[a][b] - wp[b][c]
                q = None
            else:
                off = x - n2
                l = off // n + 1
                u = off % n
                a, c = p[l - 1], p[l]
                if u == a or u == c:
                    continue
                wu = wp[u]
                delta = wu[a] + wu[c] - wp[a][c]
                q = None
            if delta < -rtol * cur:
                if q is None:
                    if x < n2:
                        q = p[:l] + [u] + p[l + 1:]
                    else:
                        q = p[:l] + [u] + p[l:]
                p = _remove_cycles(q)
                cur = _walk_len(p, wp)
                lengths.append(cur)
                moved = True
                break
        if not moved and nxt is not None:
            q = _expand_non_edges(p, adj_sets, nxt)
            if q is not None:
                p = q
                cur = _walk_len(p, wp)
                lengths.append(cur)
                moved = True
        if not moved:
            break
    path = np.asarray(p, dtype=np.int64)
    if trace:
        return path, lengths
    return path


def _tour_len(tour, d):
    n = len(tour)
    return sum(d[tour[i]][tour[(i + 1) % n]] for i in range(n))


def two_opt_moves(n):
    """Non-degenerate 2-opt moves as (i, j): reverse tour[i+1..j]."""
    moves = []
    for i in range(n - 2):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            moves.append((i, j))
    return moves


def tsp_search(d, seed, init=None, rtol=1e-12, trace=False):
    rng = SplitMix64(seed)
    d = np.asarray(d, dtype=float).tolist()
    n = len(d)
    if init is None:
        tour = list(range(n))
        for r in range(n - 1, 0, -1):
            j = rng.below(r + 1)
            tour[r], tour[j] = tour[j], tour[r]
    else:
        tour = [int(v) for v in init]
    moves = two_opt_moves(n)
    m = len(moves)
    cur = _tour_len(tour, d)
    lengths = [cur]
    while True:
        moved = False
        for x in _LazyPerm(m, rng):
            i, j = moves[x]
            a, b, c, e = tour[i], tour[i + 1], tour[j], tour[(j + 1) % n]
            da, dc = d[a], d[c]
            delta = da[c] + d[b][e] - da[b] - dc[e]
            if delta < -rtol * cur:
                tour[i + 1:j + 1] = tour[i + 1:j + 1][::-1]
                cur = _tour_len(tour, d)
                lengths.append(cur)
                moved = True
                break
        if not moved:
            break
    out = np.asarray(tour, dtype=np.int64)
    if trace:
        return out, lengths
    return out


def spp_search(set_ptr, set_cells, cost, n_cells, seed, init=None, trace=False):
    rng = SplitMix64(seed)
    set_ptr = [int(x) for x in set_ptr]
    set_cells = [int(x) for x in set_cells]
    cost = [int(x) for x in cost]
    m = len(cost)
    cells = [set_cells[set_ptr[j]:set_ptr[j + 1]] for j in range(m)]
    owner = [-1] * int(n_cells)
    chosen = [False] * m
    order = []
    if init is not None:
        for j in sorted(int(v) for v in init):
            for c in cells[j]:
                if owner[c] != -1:
                    raise ValueError("initial selection is not a packing")
                owner[c] = j
            chosen[j] = True
            order.append(j)
    weight = sum(cost[j] for j in order)
    weights = [weight]
    while True:
        ns = len(order)
        total = m + ns * m
        moved = False
        for x in _LazyPerm(total, rng):
            if x < m:
                j = x
                if chosen[j] or cost[j] <= 0:
                    continue
                if any(owner[c] != -1 for c in cells[j]):
                    continue
                i = -1
            else:
                off = x - m
                i = order[off // m]
                j = off % m
                if chosen[j] or cost[j] <= cost[i]:
                    continue
                if any(owner[c] != -1 and owner[c] != i for c in cells[j]):
                    continue
            if i >= 0:
                for c in cells[i]:
                    owner[c] = -1
                chosen[i] = False
                order.remove(i)
                weight -= cost[i]
            for c in cells[j]:
                owner[c] = j
            chosen[j] = True
            order.append(j)
            order.sort()
            weight += cost[j]
            weights.append(weight)
            moved = True
            break
        if not moved:
            break
    out = np.asarray(order, dtype=np.int64)
    if trace:
        return out, weights
    return out


def jaccard_matrix(ptr, elems):
    ptr = np.asarray(ptr, dtype=np.int64)
    elems = np.asarray(elems, dtype=np.int64)
    n = len(ptr) - 1
    width = int(elems.max()) + 1 if len(elems) else 1
    data = np.ones(len(elems), dtype=np.float64)
    x = sparse.csr_matrix((data, elems, ptr), shape=(n, width))
    inter = (x @ x.T).toarray()
    sizes = np.diff(ptr).astype(np.float64)
    union = sizes[:, None] + sizes[None, :] - inter
    out = np.zeros((n, n), dtype=np.float64)
    nz = union > 0
    out[nz] = 1.0 - inter[nz] / union[nz]
    return out


def floyd_warshall(w):
    d = np.array(w, dtype=np.float64)
    n = d.shape[0]
    nxt = np.where(np.isfinite(d), np.arange(n)[None, :], -1).astype(np.int64)
    for k in range(n):
        cand = d[:, k, None] + d[None, k, :]
        better = cand < d
        if better.any():
            d = np.where(better, cand, d)
            nxt = np.where(better, nxt[:, k, None], nxt)
    return d, nxt
