import re

import numpy as np
import pytest

from scsframe.diversity import pairwise_matrix
from scsframe.generators import gen_sp_grid, gen_spp, gen_tsp
from scsframe.tsp import tour_edge_set
from scsframe.viz import (
    RAMP, export_histogram, export_superimposition, histogram_percentages, ramp_color, sharing_ratios, visible_elements,
)


def ratios_in(svg):
    return [float(x) for x in re.findall(r'data-ratio="([0-9.]+)"', svg)]


def test_histogram_examples():
    pct, pairs = histogram_percentages(np.array([[0, 0.555], [0.555, 0]]))
    assert pairs == 1 and pct[55] == 100.0 and pct.sum() == 100.0
    pct, _ = histogram_percentages(np.zeros((3, 3)))
    assert pct[0] == 100.0
    pct, _ = histogram_percentages(np.array([[0, 1.0], [1.0, 0]]))
    assert pct[99] == 100.0
    # 0.29 is stored as 0.28999999999999998 and must still land in [0.29, 0.30)
    pct, _ = histogram_percentages(np.array([[0, 0.29], [0.29, 0]]))
    assert pct[29] == 100.0
    with pytest.raises(ValueError):
        histogram_percentages(np.zeros((1, 1)))


def test_histogram_pair_count_and_mass():
    rng = np.random.default_rng(0)
    m = rng.random((1000, 1000))
    m = np.triu(m, 1) + np.triu(m, 1).T
    pct, pairs = histogram_percentages(m)
    assert pairs == 499_500
    assert abs(pct.sum() - 100) <= 1e-9
    assert np.all(pct >= 0)


def test_export_histogram_files(tmp_path):
    m = pairwise_matrix([frozenset({1, 2}), frozenset({2, 3}), frozenset({1, 2})])
    export_histogram(m, tmp_path / "h.csv")
    rows = (tmp_path / "h.csv").read_text().splitlines()
    assert rows[0] == "bin_lo,bin_hi,pct" and len(rows) == 101
    assert rows[1].startswith("0.00,0.01,33.3333")
    assert (tmp_path / "h.svg").read_text().startswith("<svg")


def test_sharing_ratios():
    paths = [{"a", "e"}, {"b", "e"}, {"c"}]
    r = sharing_ratios(paths)
    assert r["e"] == pytest.approx(2 / 3) and r["a"] == pytest.approx(1 / 3)
    assert sharing_ratios([{1, 2}, {1}]) == {1: 1.0, 2: 0.5}
    assert all(0 < v <= 1 for v in r.values())
    with pytest.raises(ValueError):
        sharing_ratios([])


def test_ramp_and_visibility():
    assert ramp_color(0) == "#%02x%02x%02x" % RAMP[0]
    assert ramp_color(1) == "#%02x%02x%02x" % RAMP[2]
    assert ramp_color(0.5) == "#dddddd"
    assert visible_elements({1: 0.5, 2: 0.51}, "tsp") == {2: 0.51}
    assert visible_elements({1: 0.5, 2: 0.51}, "spp") == {2: 0.51}
    assert visible_elements({1: 0.1}, "sp-grid") == {1: 0.1}


def test_sp_superimposition(tmp_path):
    g = gen_sp_grid(3, 3, 0)
    # every path leaves s along 0-1; they split afterwards
    paths = [[0, 1, 4, 7, 8], [0, 1, 4, 5, 8], [0, 1, 2, 5, 8]]
    elems = [frozenset((min(a, b), max(a, b)) for a, b in zip(p, p[1:])) for p in paths]
    shown = export_superimposition(g, elems, tmp_path / "c.svg")
    assert shown[(0, 1)] == 1.0 and shown[(1, 4)] == pytest.approx(2 / 3) and shown[(4, 7)] == pytest.approx(1 / 3)
    svg = (tmp_path / "c.svg").read_text()
    assert "cluster of 3 solutions" in svg
    assert f'stroke="{ramp_color(1.0)}"' in svg
    assert sorted(ratios_in(svg)) == sorted(round(v, 6) for v in shown.values())


def test_single_solution_cluster_is_all_max(tmp_path):
    g = gen_sp_grid(3, 3, 0)
    shown = export_superimposition(g, [frozenset({(0, 1), (1, 2), (2, 5), (5, 8)})], tmp_path / "c.svg")
    assert set(shown.values()) == {1.0}


def test_tsp_half_shared_edges_hidden(tmp_path):
    inst = gen_tsp(6, 0)
    a = tour_edge_set([0, 1, 2, 3, 4, 5])
    b = tour_edge_set([0, 2, 1, 3, 4, 5])
    shown = export_superimposition(inst, [a, b], tmp_path / "t.svg")
    assert set(shown) == a & b
    assert all(r > 0.5 for r in ratios_in((tmp_path / "t.svg").read_text()))


@pytest.mark.parametrize("view", ["sets", "cells"])
def test_spp_superimposition(tmp_path, view):
    inst = gen_spp(6, 6, 20, 0)
    if view == "sets":
        sols = [frozenset({0, 1}), frozenset({0, 2}), frozenset({0})]
    else:
        sols = [frozenset(inst.cells[0]), frozenset(inst.cells[0]) | frozenset(inst.cells[1])]
    shown = export_superimposition(inst, sols, tmp_path / "p.svg", spp_view=view)
    assert shown and all(r > 0.5 for r in shown.values())
    assert len(ratios_in((tmp_path / "p.svg").read_text())) == len(shown)


def test_superimposition_errors(tmp_path):
    with pytest.raises(ValueError):
        export_superimposition(np.zeros(3), [{1}], tmp_path / "x.svg")
    from scsframe.sp import WeightedGraph

    bare = WeightedGraph(2, [(0, 1)], [1.0], 0, 1)
    with pytest.raises(ValueError):
        export_superimposition(bare, [{(0, 1)}], tmp_path / "x.svg")
