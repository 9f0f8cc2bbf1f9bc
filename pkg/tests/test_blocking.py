import random
from fractions import Fraction
from itertools import combinations

import pytest

from karbblock.blocking import (
    EMPTY_FAMILY,
    F_PAIR_FORMULA,
    MANDATORY_ARC,
    SMALL_SEARCH,
    ExhaustiveBoundError,
    best_f_pair,
    f_W,
    f_W_shadow,
    is_transversal,
    min_f_pair,
    minimum_transversal,
    minimum_transversal_L_tight,
    minimum_transversal_rooted,
    shadow_sets,
    small_transversal,
)
from karbblock.graphcore import Digraph, LaminarFamily
from karbblock.instance import load_fixture
from karbblock.oracle import (
    brute_min_transversal,
    brute_min_transversal_L_tight,
    brute_min_transversal_rooted,
    random_instance,
    random_tight_family,
)
from karbblock.arb import find_L_tight


def _abc():
    # a=0, b=1, c=2 with {a, b} a member
    D = Digraph.from_pairs(range(3), [(0, 2), (1, 2), (2, 0)])
    L = LaminarFamily.build(D.nodes, [{0, 1}]).normalized()
    return D, L


def test_f_W_by_definition():
    D, L = _abc()
    W = {0, 1, 2}
    assert f_W(D, L, W, {2}) == (2, (0, 1))
    assert f_W(D, L, W, {1, 2})[0] == 0
    assert f_W(D, L, W, {1})[0] == 0


def test_shadow_sets():
    D, L = _abc()
    T = shadow_sets(D, L, {0, 1, 2})
    assert T[0] == frozenset({0, 1}) and T[1] == frozenset({0, 1})
    assert T[2] == frozenset({2})


def test_shadow_formula_matches_definition():
    rng = random.Random(2)
    for _ in range(40):
        D, k = random_instance(rng, n_range=(2, 6))
        nodes = sorted(D.nodes)
        L = LaminarFamily.build(D.nodes, [nodes[: rng.randint(1, len(nodes))]]).normalized()
        for W in L:
            for r in range(1, len(W) + 1):
                for Z in combinations(sorted(W), r):
                    assert f_W_shadow(D, L, W, Z) == f_W(D, L, W, Z)[0]


def test_pair_on_two_isolated_nodes():
    D = Digraph.from_pairs(range(2), [])
    L = LaminarFamily.build(D.nodes).normalized()
    w = min_f_pair(D, L, {0, 1})
    assert (w.Z1, w.Z2, w.value) == ((0,), (1,), 0)


def test_pair_matches_double_loop():
    rng = random.Random(8)
    for _ in range(25):
        D, _ = random_instance(rng, n_range=(2, 6))
        L = LaminarFamily.build(D.nodes).normalized()
        W = frozenset(D.nodes)
        if len(W) < 2:
            continue
        subsets = [frozenset(c) for r in range(1, len(W) + 1) for c in combinations(sorted(W), r)]
        f = {Z: f_W(D, L, W, Z)[0] for Z in subsets}
        want = min(f[X] + f[Y] for X in subsets for Y in subsets if not X & Y)
        w = min_f_pair(D, L, W)
        assert w.value == want
        assert len(set(w.E1) | set(w.E2)) == w.value


def test_pair_bound():
    D = Digraph.from_pairs(range(5), [])
    L = LaminarFamily.build(D.nodes).normalized()
    with pytest.raises(ExhaustiveBoundError):
        min_f_pair(D, L, D.nodes, max_size=4)


def test_is_transversal_extremes():
    D = Digraph.from_pairs(range(3), [(0, 1), (0, 2), (1, 2), (2, 1)])
    L = LaminarFamily.build(D.nodes).normalized()
    assert not is_transversal(D, 0, 1, L, [])
    assert is_transversal(D, 0, 1, L, D.arc_ids)


def test_small_search_zero_budget():
    D = Digraph.from_pairs(range(3), [(0, 1), (0, 2), (1, 2), (2, 1)])
    assert small_transversal(D, 0, 1, None, 0) is None
    E = Digraph.from_pairs(range(3), [(0, 1)])
    assert small_transversal(E, 0, 1, None, 0) == ()


def test_small_search_finds_bridge():
    inst = load_fixture("bridge.txt")
    res = minimum_transversal(inst.digraph, inst.k)
    assert res.provenance == SMALL_SEARCH
    assert res.size == inst.expect["minTransversalSize"]
    assert brute_min_transversal(inst.digraph, inst.k)[0] == 1


def test_mandatory_arc_fixture():
    inst = load_fixture("mandatory_arc.txt")
    res = minimum_transversal(inst.digraph, inst.k)
    assert res.provenance == MANDATORY_ARC == inst.expect["provenance"]
    assert res.size == 1 and res.opt_cost == Fraction(4)


def test_empty_family():
    D = Digraph.from_pairs(range(3), [(0, 1)], [1])
    res = minimum_transversal(D, 1)
    assert res.arcs == () and res.provenance == EMPTY_FAMILY
    assert minimum_transversal_rooted(D, 0, 1).provenance == EMPTY_FAMILY


def test_single_node_is_rejected():
    with pytest.raises(ValueError):
        minimum_transversal(Digraph.from_pairs([0], []), 1)


def test_formula_path_used():
    # complete bidirected triangle, zero costs, k=1: every arborescence is optimal
    D = Digraph.from_pairs(range(3), [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)], [0] * 6)
    res = minimum_transversal_rooted(D, 0, 1)
    assert res.provenance == F_PAIR_FORMULA
    assert res.size == brute_min_transversal_rooted(D, 0, 1)[0] == 2


def test_unrooted_against_oracle():
    rng = random.Random(77)
    for _ in range(60):
        D, k = random_instance(rng, planted=rng.random() < 0.8)
        assert minimum_transversal(D, k).size == brute_min_transversal(D, k)[0]


def test_rooted_against_oracle():
    rng = random.Random(78)
    for _ in range(60):
        D, k = random_instance(rng, root=0)
        assert minimum_transversal_rooted(D, 0, k).size == brute_min_transversal_rooted(D, 0, k)[0]


def test_L_tight_against_oracle():
    rng = random.Random(79)
    done = 0
    while done < 40:
        D, k = random_instance(rng, n_range=(3, 6), root=0)
        D = D.without_in_arcs(0)
        F = find_L_tight(D, 0, k, None)
        if F is None:
            continue
        L = random_tight_family(rng, D, k, F, avoid=0)
        res = minimum_transversal_L_tight(D, 0, k, L)
        assert res.size == brute_min_transversal_L_tight(D, 0, k, L)[0]
        assert is_transversal(D, 0, k, L, res.arcs)
        done += 1


def test_parallel_pair_search_is_identical():
    rng = random.Random(80)
    for _ in range(10):
        D, _ = random_instance(rng, n_range=(4, 6))
        nodes = sorted(D.nodes)
        L = LaminarFamily.build(D.nodes, [nodes[:2], nodes[:3]]).normalized()
        assert best_f_pair(D, L, jobs=1) == best_f_pair(D, L, jobs=4)


def test_root_inside_a_member_is_rejected():
    D = Digraph.from_pairs(range(3), [(0, 1), (0, 2), (1, 2), (2, 1)])
    L = LaminarFamily.build(D.nodes, [{0, 2}])
    with pytest.raises(ValueError):
        minimum_transversal_L_tight(D, 0, 1, L)
