from itertools import combinations

import pytest

from karbblock.matroid import (
    MatroidError,
    direct_sum,
    forest_packing,
    free_oracle,
    graphic_oracle,
    graphic_rank,
    k_fold_graphic_rank,
    k_shorten,
    matroid_intersection_max,
    matroid_intersection_min_cost,
    partition_oracle,
    uniform_oracle,
    uniform_rank,
)

TRIANGLE = [(0, 1), (1, 2), (0, 2)]


def test_graphic_rank_values():
    assert graphic_rank(TRIANGLE) == 2
    assert graphic_rank([]) == 0
    assert graphic_rank([(0, 1), (2, 3)]) == 2


def test_k_fold_graphic_rank_values():
    assert k_fold_graphic_rank(TRIANGLE, 2) == 3
    assert k_fold_graphic_rank([(0, 1), (0, 1)], 2) == 2
    assert k_fold_graphic_rank([(0, 1), (0, 1)], 1) == 1


def test_forest_packing_gives_forests():
    edges = TRIANGLE + [(0, 1), (1, 2), (2, 3)]
    size, label = forest_packing(edges, 2)
    assert size == k_fold_graphic_rank(edges, 2) == 5
    for f in (0, 1):
        chosen = [e for e, lab in zip(edges, label) if lab == f]
        assert graphic_rank(chosen) == len(chosen)


def test_k_fold_rank_matches_brute_force():
    edges = TRIANGLE + [(0, 1), (2, 3), (3, 0), (1, 3)]
    for k in (1, 2, 3):
        for r in range(len(edges) + 1):
            for X in combinations(range(len(edges)), r):
                sub = [edges[i] for i in X]
                # brute force: best split into k forests by trying every labelling is too slow;
                # use the matroid union rank formula min over Y of |X - Y| + k r(Y)
                best = min(len(sub) - len(Y) + k * graphic_rank([sub[i] for i in Y])
                           for q in range(len(sub) + 1) for Y in combinations(range(len(sub)), q))
                assert k_fold_graphic_rank(sub, k) == best


def test_uniform_shorten_and_direct_sum():
    assert uniform_rank(range(5), 3) == 3
    g = graphic_oracle(dict(enumerate(TRIANGLE)))
    assert k_shorten(g, 1)({0, 1, 2}) == 1
    A = uniform_oracle(["a", "b", "c"], 2)
    B = uniform_oracle(["d"], 1)
    assert direct_sum([A, B])({"a", "b", "c", "d"}) == 3


def test_partition_oracle_checks():
    P = partition_oracle([[0, 1], [2]], [1, 1])
    assert P({0, 1, 2}) == 2
    with pytest.raises(MatroidError):
        P({7})
    with pytest.raises(MatroidError):
        partition_oracle([[0], [0]], [1, 1])


def test_intersection_small_cases():
    F = free_oracle(range(3))
    assert matroid_intersection_max(F, F).size == 3
    assert matroid_intersection_max(uniform_oracle(range(3), 1), F).size == 1


def test_intersection_recovers_unique_arborescence():
    # 0 -> 1 -> 2 plus 2 -> 1; rooted at 0 the only arborescence is {0, 1}
    arcs = {0: (0, 1), 1: (1, 2), 2: (2, 1)}
    M1 = graphic_oracle(arcs)
    M2 = partition_oracle([[0, 2], [1]], [1, 1])
    res = matroid_intersection_max(M1, M2)
    assert res.elements == frozenset({0, 1})


def test_min_cost_intersection():
    F = free_oracle(range(3))
    res = matroid_intersection_min_cost(F, F, {0: 5, 1: 1, 2: 3}, 2)
    assert res.cost == 4 and res.elements == frozenset({1, 2})
    assert matroid_intersection_min_cost(F, F, {0: 5, 1: 1, 2: 3}, 0).cost == 0
    assert matroid_intersection_min_cost(uniform_oracle(range(3), 1), F, {0: 1, 1: 1, 2: 1}, 2) is None


def test_min_cost_arborescence_matches_subset_search():
    arcs = {0: (0, 1), 1: (0, 2), 2: (1, 2), 3: (2, 1), 4: (0, 1)}
    cost = {0: 3, 1: 4, 2: 1, 3: 1, 4: 2}
    M1 = graphic_oracle(arcs)
    M2 = partition_oracle([[0, 3, 4], [1, 2]], [1, 1])
    res = matroid_intersection_min_cost(M1, M2, cost, 2)
    best = min(sum(cost[a] for a in X) for X in combinations(arcs, 2)
               if M1.independent(X) and M2.independent(X))
    assert res.cost == best == 3


def test_mismatched_grounds():
    with pytest.raises(MatroidError):
        matroid_intersection_max(free_oracle([0]), free_oracle([1]))
