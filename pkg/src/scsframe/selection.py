"""Turn overlapping clusters into one representative per cluster."""
from dataclasses import dataclass, field

import numpy as np

from .diversity import SolowPolaskyConfig, SolowPolaskyEliminator, solow_polasky

CRITERIA = ("min", "avg", "sp")


@dataclass(frozen=True)
class SelectionCriterion:
    tag: str = "sp"
    sp: SolowPolaskyConfig = field(default_factory=SolowPolaskyConfig)
    # criteria are evaluated against all remaining solutions ("all", default)
    # or only the members of the selected cluster ("cluster")
    scope: str = "all"

    def __post_init__(self):
        if self.tag not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {self.tag!r}")
        if self.scope not in ("all", "cluster"):
            raise ValueError(f"unknown scope {self.scope!r}")


def dedup_map(solutions):
    """Map each index to the lowest index holding an identical element set."""
    first = {}
    rep = []
    for i, s in enumerate(solutions):
        key = frozenset(s)
        rep.append(first.setdefault(key, i))
    return rep


def setup(solutions, clusters):
    """Collapse duplicates onto their lowest index, then give every solution one cluster.

    A solution in several clusters stays in one of the smallest (lowest
    cluster index on ties) and leaves the rest; solutions are processed in
    ascending index order. Empty clusters are dropped.
    """
    rep = dedup_map(solutions)
    cl = [set(rep[i] for i in c) for c in clusters]
    members = sorted(set().union(*cl)) if cl else []
    for s in members:
        holders = [k for k, c in enumerate(cl) if s in c]
        if len(holders) < 2:
            continue
        keep = min(holders, key=lambda k: (len(cl[k]), k))
        for k in holders:
            if k != keep:
                cl[k].discard(s)
    return [sorted(c) for c in cl if c]


def _as_gen(rng):
    if rng is None or isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _choose(values, mode, rng):
    """Index of the min (or max) value; ties within tolerance go to rng or lowest position."""
    values = np.asarray(values, dtype=float)
    best = values.min() if mode == "min" else values.max()
    tol = 1e-12 * max(1, len(values))
    ties = np.flatnonzero(np.abs(values - best) <= tol)
    if rng is None or len(ties) == 1:
        return int(ties[0])
    return int(ties[rng.integers(len(ties))])


def criterion_remove(cluster, remaining, matrix, crit, rng=None):
    """Which member of ``cluster`` to eliminate next."""
    rng = _as_gen(rng)
    cluster = sorted(int(i) for i in cluster)
    if len(cluster) < 2:
        raise ValueError("cluster needs at least two members")
    remaining = sorted(int(i) for i in remaining)
    matrix = np.asarray(matrix, dtype=float)
    pool = cluster if crit.scope == "cluster" else remaining
    if crit.tag == "sp":
        vals = [solow_polasky(matrix, [j for j in pool if j != i], crit.sp) for i in cluster]
        return cluster[_choose(vals, "max", rng)]
    pool = np.asarray(pool, dtype=np.int64)
    vals = []
    for i in cluster:
        others = pool[pool != i]
        row = matrix[i, others]
        vals.append(row.min() if crit.tag == "min" else row.sum())
    return cluster[_choose(vals, "min", rng)]


def select(clusters, matrix, crit, rng=None):
    """Greedy elimination from the largest cluster until each has at most one member."""
    rng = _as_gen(rng)
    cl = [sorted(int(i) for i in c) for c in clusters]
    matrix = np.asarray(matrix, dtype=float)
    elim = {}
    glob = None
    if crit.tag == "sp":
        if crit.scope == "cluster":
            elim = {k: SolowPolaskyEliminator(matrix, c, crit.sp) for k, c in enumerate(cl) if len(c) > 1}
        else:
            glob = SolowPolaskyEliminator(matrix, sorted(i for c in cl for i in c), crit.sp)
    while cl and max(len(c) for c in cl) > 1:
        size = max(len(c) for c in cl)
        k = next(k for k, c in enumerate(cl) if len(c) == size)
        if crit.tag == "sp":
            e = elim[k] if glob is None else glob
            pos = {m: q for q, m in enumerate(e.members)}
            vals = e.removal_values()
            cand = [pos[i] for i in cl[k]]
            victim = cl[k][_choose(vals[cand], "max", rng)]
            e.remove(victim)
        else:
            remaining = [i for c in cl for i in c]
            victim = criterion_remove(cl[k], remaining, matrix, crit, rng)
        cl[k].remove(victim)
    return sorted(i for c in cl for i in c)
