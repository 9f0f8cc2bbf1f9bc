"""Minimum-cost k-arborescences, restricted and L-tight variants, decomposition."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import kernels
from .graphcore import (
    Digraph,
    GraphError,
    KArborescence,
    LaminarFamily,
    as_fraction,
    build_cost_extension,
    is_rooted_k_arborescence,
    root_vector,
)
from .matroid import (
    RankOracle,
    direct_sum,
    graphic_oracle,
    k_shorten,
    matroid_intersection_max,
    matroid_intersection_min_cost,
    partition_oracle,
)

# the integer kernel multiplies costs by (m + 1) and sums up to m of them
_INT_LIMIT = 2**61


def _integer_costs(costs: Mapping[int, Fraction]) -> tuple[dict[int, int], int]:
    scale = 1
    for c in costs.values():
        scale = math.lcm(scale, Fraction(c).denominator)
    return {a: int(Fraction(c) * scale) for a, c in costs.items()}, scale


def _truncate_parallel(D: Digraph, arcs, costs: Mapping[int, int], k: int) -> list[int]:
    """Keep the ``k`` smallest ids of each (tail, head, cost) class; no optimum needs more."""
    seen: dict[tuple, int] = {}
    keep = []
    for a in sorted(arcs):
        key = (D.tail(a), D.head(a), costs[a])
        if seen.get(key, 0) < k:
            seen[key] = seen.get(key, 0) + 1
            keep.append(a)
    return keep


def _generic_rooted(D: Digraph, s: int, k: int, arcs: list[int], costs: Mapping[int, int]):
    target = k * (len(D.nodes) - 1)
    M1 = graphic_oracle({a: D.arcs[a] for a in arcs}, k)
    blocks = [[a for a in arcs if D.head(a) == v] for v in sorted(D.nodes) if v != s]
    blocks = [b for b in blocks if b]
    M2 = partition_oracle(blocks, [k] * len(blocks))
    res = matroid_intersection_min_cost(M1, M2, {a: costs[a] for a in arcs}, target)
    if res is None:
        return None
    return res.elements, int(res.cost)


def rooted_min_cost_arcs(D: Digraph, s: int, k: int, costs: Mapping[int, int]):
    """Core solver on integer costs: ``(arc set, cost)`` of a cheapest s-rooted
    k-arborescence, or None. Arcs entering ``s`` are ignored."""
    if s not in D.nodes:
        raise GraphError(f"root {s} is not a node")
    if k < 1:
        raise GraphError("k must be positive")
    n = len(D.nodes)
    target = k * (n - 1)
    if target == 0:
        return frozenset(), 0
    arcs = [a for a in D.arc_ids if D.head(a) != s]
    arcs = _truncate_parallel(D, arcs, costs, k)
    if len(arcs) < target:
        return None
    m = len(arcs)
    cmax = max((abs(costs[a]) for a in arcs), default=0)
    if (cmax + 1) * (m + 1) * (m + 1) >= _INT_LIMIT:
        return _generic_rooted(D, s, k, arcs, costs)
    index = {v: i for i, v in enumerate(sorted(D.nodes))}
    tails = np.array([index[D.tail(a)] for a in arcs], dtype=np.int64)
    heads = np.array([index[D.head(a)] for a in arcs], dtype=np.int64)
    cvec = np.array([costs[a] for a in arcs], dtype=np.int64)
    size, chosen, total = kernels.karb_min_cost(n, index[s], k, tails, heads, cvec, target)
    if size < target:
        return None
    F = frozenset(a for a, bit in zip(arcs, chosen.tolist()) if bit)
    return F, int(total)


def min_cost_rooted_k_arb(D: Digraph, s: int, k: int, costs: Mapping | None = None) -> KArborescence | None:
    """Cheapest s-rooted k-arborescence under ``costs`` (default: the digraph's costs, or 0)."""
    if costs is None:
        costs = D.costs if D.costs is not None else {a: 0 for a in D.arcs}
    frac = {a: as_fraction(costs[a]) for a in D.arcs}
    if any(c < 0 for c in frac.values()):
        raise GraphError("costs must be nonnegative")
    icost, scale = _integer_costs(frac)
    found = rooted_min_cost_arcs(D, s, k, icost)
    if found is None:
        return None
    F, total = found
    return KArborescence(F, k, s, root_vector(D, F, k), Fraction(total, scale))


def min_cost_k_arb(D: Digraph, k: int, costs: Mapping | None = None) -> KArborescence | None:
    """Cheapest (unrooted) k-arborescence, through the cost extension with a new root."""
    if costs is None:
        costs = D.costs if D.costs is not None else {a: 0 for a in D.arcs}
    Dc = D.with_costs(costs)
    beta = sum(Dc.costs.values(), Fraction(0)) + 1
    Dp, added = build_cost_extension(Dc, len(D.arcs) + k, beta)
    s = next(iter(Dp.nodes - D.nodes))
    best = min_cost_rooted_k_arb(Dp, s, k)
    if best is None:
        return None
    used = [a for a in best.arcs if a in added]
    if len(used) != k:
        # an extension optimum with more than k root arcs means D has no k-arborescence
        return None
    F = frozenset(a for a in best.arcs if a not in added)
    return KArborescence(F, k, None, root_vector(D, F, k), best.cost - k * beta)


def exists_matroid_restricted_k_arb(D: Digraph, family: Mapping[int, RankOracle], k: int) -> bool:
    """Is there a k-arborescence whose in-star at each ``v`` is independent in ``family[v]``?"""
    target = k * (len(D.nodes) - 1)
    if target == 0:
        return True
    for v in D.nodes:
        M = family.get(v)
        if M is None:
            if D.in_arcs(v):
                raise GraphError(f"no matroid given for the in-star of node {v}")
            continue
        if set(M.ground) != set(D.in_arcs(v)):
            raise GraphError(f"matroid at node {v} is not on its in-star")
    parts = [k_shorten(family[v], k) for v in sorted(D.nodes) if D.in_arcs(v)]
    M1 = graphic_oracle(dict(D.arcs), k)
    M2 = direct_sum(parts)
    return matroid_intersection_max(M1, M2).size == target


def _tight_members(L: LaminarFamily | None, s: int) -> list[frozenset]:
    if L is None:
        return []
    return [W for W in L if s not in W]


def tightness_costs(D: Digraph, members) -> dict[int, int]:
    """Number of given members each arc enters."""
    return {a: sum(1 for W in members if D.head(a) in W and D.tail(a) not in W) for a in D.arc_ids}


def find_L_tight(D: Digraph, s: int, k: int, L: LaminarFamily | None) -> frozenset | None:
    """An L-tight s-rooted k-arborescence, or None. Only members avoiding ``s`` constrain."""
    members = _tight_members(L, s)
    found = rooted_min_cost_arcs(D, s, k, tightness_costs(D, members))
    if found is None:
        return None
    F, cost = found
    # every rooted k-arborescence enters each member at least k times
    return F if cost == k * len(members) else None


def exists_L_tight(D: Digraph, s: int, k: int, L: LaminarFamily | None) -> bool:
    return find_L_tight(D, s, k, L) is not None


def decompose(D: Digraph, F, s: int, k: int) -> list[frozenset]:
    """Split a rooted k-arborescence into k arc-disjoint spanning s-arborescences."""
    F = sorted(F)
    if not is_rooted_k_arborescence(D, F, s, k):
        raise GraphError("input is not a rooted k-arborescence")
    index = {v: i for i, v in enumerate(sorted(D.nodes))}
    n = len(index)
    rest = list(F)
    parts = []
    for remaining in range(k, 0, -1):
        if remaining == 1:
            parts.append(frozenset(rest))
            break
        tree: list[int] = []
        reached = {s}
        while len(reached) < n:
            for a in rest:
                u, v = D.arcs[a]
                if u not in reached or v in reached:
                    continue
                trial = [b for b in rest if b != a]
                tails = np.array([index[D.tail(b)] for b in trial], dtype=np.int64)
                heads = np.array([index[D.head(b)] for b in trial], dtype=np.int64)
                if kernels.rooted_k_connected(n, index[s], remaining - 1, tails, heads):
                    tree.append(a)
                    reached.add(v)
                    rest = trial
                    break
            else:  # pragma: no cover - excluded by the packing theorem
                raise GraphError("greedy decomposition got stuck")
        parts.append(frozenset(tree))
    return parts
