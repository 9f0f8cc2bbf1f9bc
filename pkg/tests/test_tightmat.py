import random
from itertools import combinations

import pytest

from karbblock.arb import find_L_tight, min_cost_k_arb
from karbblock.graphcore import Digraph, LaminarFamily, is_L_tight
from karbblock.matroid import uniform_oracle
from karbblock.oracle import enumerate_rooted_k_arbs, random_instance, random_tight_family
from karbblock.tightmat import (
    NoTightArborescenceError,
    PFunction,
    RecursionBoundError,
    TightMatroidContext,
    exchange_property,
    mandatory_arc_transform,
    rank_MW,
    rank_recursive,
    root_vectors_of_optima,
)


def _contexts(seed, count, alpha_k=True, n_range=(2, 5)):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        D, k = random_instance(rng, n_range=n_range, ks=(1, 2), max_arcs=10)
        D = D.with_costs(None)
        best = min_cost_k_arb(D, k)
        if best is None:
            continue
        L = random_tight_family(rng, D, k, best.arcs)
        out.append(TightMatroidContext(D, L, k, alpha=k if alpha_k else None))
    return out


def test_singleton_rank_is_uniform():
    for ctx in _contexts(1, 8):
        for v in ctx.D.nodes:
            star = ctx.in_star({v})
            for r in range(min(len(star), 4) + 1):
                for E in combinations(star, r):
                    assert rank_MW(ctx, {v}, E) == min(ctx.k, len(E))


def test_empty_and_full_star():
    for ctx in _contexts(2, 8):
        for W in ctx.L:
            assert rank_MW(ctx, W, ()) == 0
            assert rank_MW(ctx, W, ctx.in_star(W)) == ctx.k


def test_recursive_rank_agrees():
    for ctx in _contexts(3, 10):
        for W in ctx.L:
            star = ctx.in_star(W)
            for r in range(min(len(star), 3) + 1):
                for E in list(combinations(star, r))[:30]:
                    assert rank_recursive(ctx, W, E) == rank_MW(ctx, W, E) <= ctx.k


def test_recursive_bound():
    D = Digraph.from_pairs(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    ctx = TightMatroidContext(D, LaminarFamily.build(D.nodes), 1, alpha=1)
    with pytest.raises(RecursionBoundError):
        rank_recursive(ctx, D.nodes, ctx.in_star(D.nodes), max_children=2)


def test_context_needs_tight_arborescence():
    D = Digraph.from_pairs(range(3), [(0, 1), (1, 2), (2, 0)])
    L = LaminarFamily.build(D.nodes, [{1, 2}])
    # k=2 is impossible with one arc per pair
    with pytest.raises(NoTightArborescenceError):
        TightMatroidContext(D, L, 2)


def test_oracle_is_a_matroid_on_the_star():
    ctx = _contexts(4, 1)[0]
    W = max(ctx.L, key=len)
    M = ctx.oracle(W)
    assert set(M.ground) == set(ctx.in_star(W))
    assert M(M.ground) == ctx.k


def _p_instance(k):
    # root 0 sends k arcs to each of 1 and 2; 1 and 2 exchange k arcs each way
    pairs = [(0, 1)] * k + [(0, 2)] * k + [(1, 2)] * k + [(2, 1)] * k
    D = Digraph.from_pairs(range(3), pairs)
    mats = {v: uniform_oracle(D.in_arcs(v), k) for v in (1, 2)}
    return D, PFunction(D, 0, k, mats)


@pytest.mark.parametrize("k", [1, 2])
def test_p_values(k):
    D, p = _p_instance(k)
    assert p(()) == 0
    assert p(D.out_arcs(0)) == k


@pytest.mark.parametrize("k", [1, 2])
def test_p_supermodularity(k):
    D, p = _p_instance(k)
    assert p.near_supermodular_violations() == []
    assert p.truncation_supermodular_violations() == []
    assert p.truncation(D.out_arcs(0)) >= p(D.out_arcs(0))


def test_root_rank_and_bases():
    D, p = _p_instance(1)
    a, b = p.conditions()
    assert a and b
    bases = p.restricted_root_bases()
    assert bases and all(len(B) == 1 for B in bases)
    ground = D.out_arcs(0)
    for r in range(len(ground) + 1):
        for E in combinations(ground, r):
            assert p.root_rank(E) == max(len(B & set(E)) for B in bases)


def _count_tight(D, L, s, k, containing=None):
    total = 0
    for F in enumerate_rooted_k_arbs(D, s, k):
        if containing is not None and containing not in F:
            continue
        if is_L_tight(D, F, L, s, k):
            total += 1
    return total


def test_mandatory_transform_shape():
    D = Digraph.from_pairs(range(3), [(0, 1), (1, 2), (0, 2)])
    L = LaminarFamily.build(D.nodes).normalized()
    D1, _ = mandatory_arc_transform(D, L, 1, 1, 0)
    assert len(D1.arcs) == len(D.arcs) - 1 + 2
    D2, _ = mandatory_arc_transform(D, L, 1, 2, 0)
    assert len(D2.arcs) == len(D.arcs) - 1 + 3


def test_mandatory_transform_bijection():
    rng = random.Random(6)
    checked = 0
    while checked < 25:
        D, k = random_instance(rng, n_range=(3, 4), ks=(1, 2), root=0, max_arcs=9)
        D = D.without_in_arcs(0)
        F = find_L_tight(D, 0, k, None)
        if F is None:
            continue
        L = random_tight_family(rng, D, k, F, avoid=0)
        for a in D.arc_ids:
            if D.tail(a) == 0:
                continue
            D2, L2 = mandatory_arc_transform(D, L, a, k, 0)
            assert _count_tight(D, L, 0, k, containing=a) == _count_tight(D2, L2, 0, k)
        checked += 1


def test_root_vectors_triangle():
    pairs = [(u, v) for u in range(3) for v in range(3) if u != v]
    D = Digraph.from_pairs(range(3), pairs, [0] * len(pairs))
    assert root_vectors_of_optima(D, 1) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_exchange_property_detects_gaps():
    assert exchange_property({(1, 0, 0), (0, 1, 0)})
    assert not exchange_property({(2, 0, 0), (0, 0, 2)})


def test_random_root_vectors_exchange():
    rng = random.Random(9)
    for _ in range(40):
        D, k = random_instance(rng)
        vectors = root_vectors_of_optima(D, k)
        assert all(sum(q) == k for q in vectors)
        assert exchange_property(vectors)
