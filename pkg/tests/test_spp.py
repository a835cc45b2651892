import numpy as np
import pytest

from scsframe.diversity import jaccard_distance
from scsframe.generators import gen_spp
from scsframe.spp import (
    SppInstance,
    SppProblem,
    is_packing,
    is_rectangle_set,
    is_spp_local_optimum,
    occupancy,
    packing_element_view,
    packing_weight,
    rect_cells,
    spp_local_search,
    spp_neighbors,
)


def inst_of(n1, n2, rects, costs):
    return SppInstance(n1, n2, np.array(rects), np.array(costs))


# A and B overlap in cell (0, 1); C sits in the far corner
FAM = inst_of(3, 3, [(0, 0, 0, 1), (0, 0, 1, 2), (2, 2, 2, 2)], [5, 3, 7])
A, B, C = 0, 1, 2


def brute_better(p, inst):
    """Heavier feasible packings one add or one swap away, by direct enumeration."""
    p = set(p)
    w = packing_weight(p, inst)
    out = []
    for j in range(inst.m):
        if j in p:
            continue
        cands = [p | {j}] + [(p - {i}) | {j} for i in p]
        out += [q for q in cands if is_packing(q, inst) and packing_weight(q, inst) > w]
    return out


def test_rect_cells_and_predicate():
    assert rect_cells((0, 1, 1, 2), 3) == [1, 2, 4, 5]
    assert is_rectangle_set([1, 2, 4, 5], 3, 3)
    assert not is_rectangle_set([1, 2, 4], 3, 3)
    assert not is_rectangle_set([], 3, 3)


def test_instance_validation():
    with pytest.raises(ValueError):
        inst_of(2, 2, [(0, 2, 0, 0)], [1])
    with pytest.raises(ValueError):
        inst_of(2, 2, [(0, 0, 0, 0)], [0])
    with pytest.raises(ValueError):
        inst_of(2, 2, [(0, 0, 0, 0), (0, 0, 0, 0)], [1, 2])


def test_packing_examples():
    assert is_packing([], FAM)
    assert not is_packing([A, B], FAM)
    opp = inst_of(4, 4, [(0, 1, 0, 1), (2, 3, 2, 3)], [1, 1])
    assert is_packing([0, 1], opp)
    assert packing_weight([], FAM) == 0
    assert packing_weight([C], FAM) == 7
    assert packing_weight([A, C], FAM) == 12
    assert occupancy([A, C], FAM).sum() == 3 and occupancy([A, C], FAM).max() == 1


def test_neighbour_examples():
    two = inst_of(2, 2, [(0, 0, 0, 0), (1, 1, 1, 1)], [1, 1])
    nb = {q for q, _ in spp_neighbors(frozenset(), two)}
    assert nb == {frozenset({0}), frozenset({1})}
    full = {q for q, _ in spp_neighbors({0, 1}, two) if len(q) == 3}
    assert full == set()
    ab = inst_of(1, 3, [(0, 0, 0, 1), (0, 0, 1, 2)], [5, 3])
    assert [(q, d) for q, d in spp_neighbors({1}, ab)] == [(frozenset({0}), 2)]


def test_overlap_family_local_optimum():
    ab = inst_of(1, 3, [(0, 0, 0, 1), (0, 0, 1, 2)], [5, 3])
    for seed in range(10):
        assert list(spp_local_search(ab, seed)) == [0]
        assert list(spp_local_search(ab, seed, init=[1])) == [0]
    assert is_spp_local_optimum({0}, ab) and not is_spp_local_optimum({1}, ab)


def test_disjoint_family_takes_everything():
    inst = inst_of(3, 3, [(0, 0, 0, 2), (1, 1, 0, 2), (2, 2, 0, 0)], [2, 4, 1])
    for seed in range(5):
        assert list(spp_local_search(inst, seed)) == [0, 1, 2]


def test_sampler_outputs_are_local_optima():
    for seed in range(3):
        inst = gen_spp(6, 6, 40, seed)
        for run in range(8):
            p, weights = spp_local_search(inst, run, trace=True)
            assert is_packing(p, inst)
            assert occupancy(p, inst).max() <= 1
            assert is_spp_local_optimum(p, inst)
            assert brute_better(p, inst) == []
            assert all(b > a for a, b in zip(weights, weights[1:]))
            assert np.array_equal(p, spp_local_search(inst, run))


def test_checker_matches_oracle_on_random_packings():
    inst = gen_spp(5, 5, 25, 9)
    rng = np.random.default_rng(1)
    for _ in range(100):
        p = set()
        for j in rng.permutation(inst.m):
            if rng.random() < 0.5 and is_packing(p | {int(j)}, inst):
                p.add(int(j))
        assert is_spp_local_optimum(p, inst) == (brute_better(p, inst) == [])


def test_element_views():
    assert packing_element_view([]) == frozenset()
    assert packing_element_view([3, 7]) == {3, 7}
    assert jaccard_distance(packing_element_view([1, 2]), packing_element_view([1, 3])) == pytest.approx(1 - 1 / 3)
    assert packing_element_view([A, C], FAM, "cells") == {0, 1, 8}
    with pytest.raises(ValueError):
        packing_element_view([A], None, "cells")
    pb = SppProblem(FAM)
    p = pb.sample(0)
    assert pb.is_feasible(p) and pb.is_local_optimum(p)
    assert pb.objective(p) == packing_weight(p, FAM)
