"""Random benchmark instances: grid and unit-disk SP, Euclidean TSP, rectangle SPP."""
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .sp import WeightedGraph
from .spp import SppInstance, is_rectangle_set
from .tsp import DECIMALS, TspInstance

GRID_WEIGHT_RANGE = (100_000, 1_000_000)
MAX_EUD_ATTEMPTS = 1000

# named benchmark sizes: (problem, size)
PRESETS = {
    "SP-Grid-100": ("sp-grid", (10, 10)),
    "SP-Grid-900": ("sp-grid", (30, 30)),
    "SP-EUD-100": ("sp-eud", (100,)),
    "SP-EUD-900": ("sp-eud", (900,)),
    "TSP-100": ("tsp", (100,)),
    "TSP-900": ("tsp", (900,)),
    "SPP-100": ("spp", (10, 10, 100)),
    "SPP-900": ("spp", (30, 30, 900)),
}


def gen_sp_grid(rows, cols, seed):
    """Lattice graph, integer weights in [1e5, 1e6]; s bottom-left, t top-right."""
    if rows * cols < 2:
        raise ValueError("grid needs at least two vertices")
    rng = np.random.default_rng(seed)
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    lo, hi = GRID_WEIGHT_RANGE
    weights = rng.integers(lo, hi + 1, size=len(edges)).astype(np.float64)
    coords = np.array([(c, r) for r in range(rows) for c in range(cols)], dtype=np.float64)
    return WeightedGraph(
        rows * cols, np.array(edges, dtype=np.int64).reshape(-1, 2), weights, 0, rows * cols - 1,
        coords=coords, kind="sp-grid", meta={"rows": rows, "cols": cols, "seed": seed},
    )


def eud_graph_from_points(points, radius=None, meta=None):
    """Unit-disk graph on rounded points; s nearest (0,0), t nearest (1,1)."""
    pts = np.round(np.asarray(points, dtype=np.float64).reshape(-1, 2), DECIMALS)
    n = len(pts)
    if radius is None:
        radius = 2.0 / math.sqrt(n)
    diff = pts[:, None, :] - pts[None, :, :]
    raw = np.sqrt((diff ** 2).sum(axis=2))
    dist = np.round(raw, DECIMALS)
    iu, ju = np.triu_indices(n, k=1)
    keep = (raw[iu, ju] <= radius) & (dist[iu, ju] > 0)
    edges = np.stack([iu[keep], ju[keep]], axis=1)
    weights = dist[iu[keep], ju[keep]]
    s = int(np.argmin(((pts - [0.0, 0.0]) ** 2).sum(axis=1)))
    t = int(np.argmin(((pts - [1.0, 1.0]) ** 2).sum(axis=1)))
    return WeightedGraph(n, edges, weights, s, t, coords=pts, kind="sp-eud", meta=dict(meta or {}))


def is_connected(g):
    if g.n == 0:
        return False
    e = g.edges
    a = csr_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(g.n, g.n))
    ncomp, _ = connected_components(a, directed=False)
    return ncomp == 1


def gen_sp_eud(n, seed, max_attempts=MAX_EUD_ATTEMPTS):
    """Unit-disk graph with disk width 2/sqrt(n), resampled until connected."""
    rng = np.random.default_rng(seed)
    for attempt in range(max_attempts):
        pts = np.round(rng.random((n, 2)), DECIMALS)
        if len(np.unique(pts, axis=0)) != n:
            continue
        g = eud_graph_from_points(pts, meta={"n": n, "seed": seed, "attempt": attempt})
        if g.s != g.t and is_connected(g):
            return g
    raise RuntimeError(f"no connected unit-disk graph after {max_attempts} attempts")


def gen_tsp(n, seed):
    rng = np.random.default_rng(seed)
    pts = np.empty((0, 2))
    while len(pts) < n:
        extra = np.round(rng.random((n - len(pts), 2)), DECIMALS)
        pts = np.concatenate([pts, extra])
        _, first = np.unique(pts, axis=0, return_index=True)
        pts = pts[np.sort(first)]
    return TspInstance(pts, meta={"n": n, "seed": seed})


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def gen_spp(n1, n2, m, seed, max_attempts=None):
    """m distinct rectangle sets with side lengths from [1, 5] and costs round(r*|S|), r in [1, 5]."""
    rng = np.random.default_rng(seed)
    max_attempts = 100 * m if max_attempts is None else max_attempts
    rects, costs, seen = [], [], set()
    attempts = 0
    while len(rects) < m:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError(f"could not place {m} distinct rectangles after {max_attempts} attempts")
        w = _round_half_up(rng.uniform(1.0, 5.0))
        h = _round_half_up(rng.uniform(1.0, 5.0))
        # four quarter-turn rotations give two footprints, each twice
        rotations = [(w, h), (h, w), (w, h), (h, w)]
        feasible = [(a, b) for a, b in rotations if a <= n1 and b <= n2]
        if not feasible:
            a, b = min(w, n1), min(h, n2)
        else:
            a, b = feasible[rng.integers(len(feasible))]
        x = int(rng.integers(0, n1 - a + 1))
        y = int(rng.integers(0, n2 - b + 1))
        r = rng.uniform(1.0, 5.0)
        rect = (x, x + a - 1, y, y + b - 1)
        if rect in seen:
            continue
        seen.add(rect)
        rects.append(rect)
        costs.append(max(1, _round_half_up(r * a * b)))
    return SppInstance(n1, n2, np.array(rects), np.array(costs), meta={"n1": n1, "n2": n2, "m": m, "seed": seed})


def parse_size(problem, size):
    """'10x10' for grids, '100' for point sets, '10x10:100' for SPP."""
    if isinstance(size, (tuple, list)):
        return tuple(int(v) for v in size)
    size = str(size).lower()
    if problem == "spp":
        grid, _, m = size.partition(":")
        a, _, b = grid.partition("x")
        if not m:
            raise ValueError("SPP size must look like 10x10:100")
        return int(a), int(b or a), int(m)
    if problem == "sp-grid":
        a, _, b = size.partition("x")
        return int(a), int(b or a)
    return (int(size),)


def generate(problem, size, seed):
    size = parse_size(problem, size)
    if problem == "sp-grid":
        return gen_sp_grid(*size, seed)
    if problem == "sp-eud":
        return gen_sp_eud(*size, seed)
    if problem == "tsp":
        return gen_tsp(*size, seed)
    if problem == "spp":
        return gen_spp(*size, seed)
    raise ValueError(f"unknown problem {problem!r}")


def problem_of(instance):
    if isinstance(instance, WeightedGraph):
        # hand-built graphs carry no generator tag
        return instance.kind if instance.kind.startswith("sp-") else "sp-graph"
    if isinstance(instance, TspInstance):
        return "tsp"
    if isinstance(instance, SppInstance):
        return "spp"
    raise TypeError(f"not an instance: {type(instance).__name__}")


def validate(instance):
    """Re-check generator contracts; raises ValueError on violation."""
    kind = problem_of(instance)
    if kind.startswith("sp-"):
        if not is_connected(instance):
            raise ValueError("graph is not connected")
    elif kind == "spp":
        for cells in instance.cells:
            if not is_rectangle_set(cells, instance.n1, instance.n2):
                raise ValueError("bad rectangle set")
        if len({frozenset(c) for c in instance.cells}) != instance.m:
            raise ValueError("duplicate rectangle sets")
    return instance
