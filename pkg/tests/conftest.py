import numpy as np
import pytest
from hypothesis import settings

from scsframe.sp import WeightedGraph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_connected_graph(rng, n, p=0.3, lo=1, hi=20, s=0, t=None):
    """Random spanning tree plus extra edges; integer weights so sums are exact."""
    t = n - 1 if t is None else t
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        u, v = int(order[k]), int(order[rng.integers(k)])
        edges.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    edges = sorted(edges)
    w = rng.integers(lo, hi + 1, size=len(edges)).astype(float)
    return WeightedGraph(n, np.array(edges), w, s, t)


def random_matrix(rng, n, zero_frac=0.0):
    """Symmetric dissimilarity matrix in [0, 1] with zero diagonal."""
    m = rng.random((n, n))
    if zero_frac:
        m[rng.random((n, n)) < zero_frac] = 0.0
    m = np.triu(m, 1)
    return m + m.T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
