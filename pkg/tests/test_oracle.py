import random

import pytest

from karbblock.arb import min_cost_k_arb, min_cost_rooted_k_arb
from karbblock.graphcore import Digraph
from karbblock.instance import load_fixture
from karbblock.oracle import (
    OracleBoundError,
    brute_min_transversal,
    enumerate_k_arbs,
    enumerate_k_arbs_unpruned,
    enumerate_rooted_k_arbs,
    enumerate_rooted_k_arbs_unpruned,
    fig2_conditions,
    fig2_witness_count,
    find_fig2_witness,
    min_hitting_set,
    optimal_sets,
    random_instance,
    tight_k_arbs,
)


def test_parallel_pair_counts():
    D = Digraph.from_pairs(range(2), [(0, 1), (0, 1)])
    assert len(enumerate_rooted_k_arbs(D, 0, 1)) == 2
    assert enumerate_rooted_k_arbs(D, 0, 2) == [(0, 1)]


def test_bounds():
    D = Digraph.from_pairs(range(8), [(0, v) for v in range(1, 8)])
    with pytest.raises(OracleBoundError):
        enumerate_rooted_k_arbs(D, 0, 2)
    E = Digraph.from_pairs(range(2), [(0, 1)] * 19)
    with pytest.raises(OracleBoundError):
        enumerate_k_arbs(E, 1)


def test_pruned_counts_equal_unpruned():
    rng = random.Random(21)
    for _ in range(60):
        D, k = random_instance(rng, n_range=(2, 4), max_arcs=10, ks=(1, 2))
        assert enumerate_rooted_k_arbs(D, 0, k) == enumerate_rooted_k_arbs_unpruned(D, 0, k)
        assert enumerate_k_arbs(D, k) == enumerate_k_arbs_unpruned(D, k)


def test_optima_cost_matches_solver():
    rng = random.Random(22)
    for _ in range(60):
        D, k = random_instance(rng)
        best, optima = optimal_sets(D, enumerate_k_arbs(D, k))
        found = min_cost_k_arb(D, k)
        assert (best is None) == (found is None)
        if optima:
            assert all(D.total_cost(F) == found.cost for F in optima)
        rooted_best, _ = optimal_sets(D, enumerate_rooted_k_arbs(D, 0, k))
        rooted = min_cost_rooted_k_arb(D, 0, k)
        assert rooted_best == (None if rooted is None else rooted.cost)


def test_hitting_set_basics():
    assert min_hitting_set([]) == (0, ())
    assert min_hitting_set([(3, 5, 7)]) == (1, (3,))
    assert min_hitting_set([(1, 2), (2, 3), (1, 3)]) == (2, (1, 2))


def test_single_optimum_gives_size_one():
    D = Digraph.from_pairs(range(3), [(0, 1), (1, 2), (0, 2)], [1, 1, 5])
    assert brute_min_transversal(D, 1)[0] == 1


def test_fig2_search_regression():
    found = find_fig2_witness(k=2, seed=0, trials=30_000)
    assert found is not None
    D, L, trial = found
    inst = load_fixture("fig2_witness.txt")
    assert trial == 24639
    assert D.arcs == inst.digraph.arcs
    assert set(L) == set(inst.laminar().normalized())


def test_fig2_fixture_by_enumeration():
    inst = load_fixture("fig2_witness.txt")
    D, k = inst.digraph, inst.k
    L = inst.laminar().normalized()
    assert fig2_conditions(D, L, k) == (True, True)
    assert enumerate_k_arbs(D, k)
    assert tight_k_arbs(D, L, k) == []


def test_k1_control_finds_nothing():
    assert fig2_witness_count(1, seed=0, trials=25_000) == 0
