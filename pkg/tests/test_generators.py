import math

import numpy as np
import pytest

from scsframe.generators import (
    GRID_WEIGHT_RANGE, PRESETS, eud_graph_from_points, gen_sp_eud, gen_sp_grid, gen_spp, gen_tsp,
    generate, is_connected, parse_size, validate,
)
from scsframe.spp import is_rectangle_set


def same_graph(a, b):
    return (a.n, a.s, a.t) == (b.n, b.s, b.t) and np.array_equal(a.edges, b.edges) and np.array_equal(a.weights, b.weights)


def test_grid_shape_and_weights():
    g = gen_sp_grid(10, 10, 0)
    assert g.n == 100 and len(g.edges) == 180
    lo, hi = GRID_WEIGHT_RANGE
    assert g.weights.min() >= lo and g.weights.max() <= hi
    assert np.all(g.weights == np.round(g.weights))
    assert g.s == 0 and g.t == 99
    assert tuple(g.coords[g.s]) == (0, 0) and tuple(g.coords[g.t]) == (9, 9)
    assert is_connected(g)
    assert same_graph(g, gen_sp_grid(10, 10, 0))
    assert not same_graph(g, gen_sp_grid(10, 10, 1))
    assert len(gen_sp_grid(3, 4, 0).edges) == 3 * 3 + 2 * 4
    with pytest.raises(ValueError):
        gen_sp_grid(1, 1, 0)


def test_eud_two_point_injection():
    g = eud_graph_from_points([(0.0, 0.0), (0.5, 0.5)])
    assert g.edges.tolist() == [[0, 1]]
    assert g.weights.tolist() == [0.707107]
    assert (g.s, g.t) == (0, 1)


def test_eud_radius_is_inclusive_and_strict_beyond():
    r = 2 / math.sqrt(2)
    assert len(eud_graph_from_points([(0, 0), (1.0, 0.0)]).edges) == 1
    assert len(eud_graph_from_points([(0, 0), (1.0, 0.5)], radius=1.0).edges) == 0
    assert r > 1.0


def test_eud_generated():
    g = gen_sp_eud(60, 3)
    assert g.n == 60 and is_connected(g)
    r = 2 / math.sqrt(60)
    for (u, v), w in zip(g.edges, g.weights):
        assert np.linalg.norm(g.coords[u] - g.coords[v]) <= r
        assert w == round(w, 6)
    s_ref = np.argmin((g.coords ** 2).sum(1))
    t_ref = np.argmin(((g.coords - 1) ** 2).sum(1))
    assert (g.s, g.t) == (s_ref, t_ref)
    assert same_graph(g, gen_sp_eud(60, 3))


def test_eud_gives_up():
    with pytest.raises(RuntimeError):
        gen_sp_eud(40, 0, max_attempts=0)


def test_tsp_points():
    inst = gen_tsp(200, 5)
    p = inst.points
    assert p.shape == (200, 2)
    assert p.min() >= 0 and p.max() <= 1
    assert len(np.unique(p, axis=0)) == 200
    assert np.array_equal(p, np.round(p, 6))
    assert np.array_equal(p, gen_tsp(200, 5).points)


def test_spp_contract():
    inst = gen_spp(10, 10, 100, 2)
    assert inst.m == 100
    assert all(is_rectangle_set(c, 10, 10) for c in inst.cells)
    assert len({frozenset(c) for c in inst.cells}) == 100
    sizes = np.array([len(c) for c in inst.cells])
    assert np.all(inst.costs >= 1) and np.all(inst.costs <= 5 * sizes + 0.5)
    assert np.all(inst.costs >= np.floor(sizes + 0.5))
    dims = [(r[1] - r[0] + 1, r[3] - r[2] + 1) for r in inst.rects.tolist()]
    assert all(1 <= a <= 5 and 1 <= b <= 5 for a, b in dims)
    again = gen_spp(10, 10, 100, 2)
    assert np.array_equal(inst.rects, again.rects) and np.array_equal(inst.costs, again.costs)


def test_spp_small_grid_clamps_and_fails():
    inst = gen_spp(2, 3, 5, 0)
    assert all(is_rectangle_set(c, 2, 3) for c in inst.cells)
    with pytest.raises(RuntimeError):
        gen_spp(1, 1, 2, 0)  # only one distinct set fits


def test_parse_size_and_presets():
    assert parse_size("sp-grid", "10x12") == (10, 12)
    assert parse_size("sp-grid", "7") == (7, 7)
    assert parse_size("tsp", "100") == (100,)
    assert parse_size("spp", "10x10:100") == (10, 10, 100)
    with pytest.raises(ValueError):
        parse_size("spp", "10x10")
    with pytest.raises(ValueError):
        generate("knapsack", "10", 0)
    assert PRESETS["SP-Grid-100"] == ("sp-grid", (10, 10))
    assert generate(*PRESETS["SPP-100"], 0).m == 100


def test_validate_rejects_broken():
    g = gen_sp_grid(3, 3, 0)
    from scsframe.sp import WeightedGraph

    cut = WeightedGraph(4, [(0, 1), (2, 3)], [1.0, 1.0], 0, 3)
    assert validate(g) is g
    with pytest.raises(ValueError):
        validate(cut)
