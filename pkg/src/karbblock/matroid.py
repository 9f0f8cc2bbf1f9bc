"""Rank-oracle matroids and intersection engines.

The engines here work for arbitrary oracles and are exact over ``Fraction``
costs. The arborescence code uses a specialised integer kernel for the one
pair of matroids it needs; these generic routines are its reference.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels


class MatroidError(ValueError):
    pass


@dataclass(frozen=True)
class RankOracle:
    ground: tuple
    rank: Callable[[frozenset], int]
    name: str = "matroid"

    def __call__(self, X) -> int:
        return self.rank(frozenset(X))

    def independent(self, X) -> bool:
        X = frozenset(X)
        return self.rank(X) == len(X)

    def restrict(self, S) -> "RankOracle":
        S = frozenset(S)
        return RankOracle(tuple(e for e in self.ground if e in S), lambda X: self.rank(X & S), self.name + "|S")


@dataclass(frozen=True)
class CommonIndependentSet:
    elements: frozenset
    size: int
    cost: Fraction | None = None


# -- concrete oracles ----------------------------------------------------------------


def graphic_rank(edges: Iterable[tuple[Hashable, Hashable]]) -> int:
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    r = 0
    for u, v in edges:
        a, b = find(u), find(v)
        if a != b:
            parent[a] = b
            r += 1
    return r


def forest_packing(edges: Sequence[tuple[Hashable, Hashable]], k: int) -> tuple[int, list[int]]:
    """Pack edges greedily into ``k`` forests with augmenting paths.

    Returns ``(rank, labels)``; ``labels[i]`` is the forest of edge ``i`` or -1.
    """
    if k < 1:
        raise MatroidError("k must be at least 1")
    if not edges:
        return 0, []
    index: dict = {}
    for u, v in edges:
        index.setdefault(u, len(index))
        index.setdefault(v, len(index))
    keep = [i for i, (u, v) in enumerate(edges) if u != v]
    tails = np.array([index[edges[i][0]] for i in keep], dtype=np.int64)
    heads = np.array([index[edges[i][1]] for i in keep], dtype=np.int64)
    labels = [-1] * len(edges)
    if not keep:
        return 0, labels
    forest, placed = kernels.partition_into_forests(len(index), k, tails, heads, np.ones(len(keep), np.bool_))
    for j, i in enumerate(keep):
        labels[i] = int(forest[j])
    return int(placed), labels


def k_fold_graphic_rank(edges: Sequence[tuple[Hashable, Hashable]], k: int) -> int:
    return forest_packing(list(edges), k)[0]


def graphic_oracle(endpoints: Mapping[Hashable, tuple[Hashable, Hashable]], k: int = 1) -> RankOracle:
    """k-fold union of the circuit matroid; ``endpoints`` maps element -> (u, v)."""
    ground = tuple(sorted(endpoints))

    def rank(X):
        edges = [endpoints[e] for e in sorted(X)]
        return graphic_rank(edges) if k == 1 else k_fold_graphic_rank(edges, k)

    return RankOracle(ground, rank, f"{k}-fold graphic")


def uniform_rank(X, k: int) -> int:
    return min(len(X), k)


def uniform_oracle(ground: Iterable, k: int) -> RankOracle:
    return RankOracle(tuple(ground), lambda X: min(len(X), k), f"U{k}")


def free_oracle(ground: Iterable) -> RankOracle:
    return RankOracle(tuple(ground), len, "free")


def partition_oracle(blocks: Sequence[Iterable], capacities: Sequence[int]) -> RankOracle:
    blocks = [frozenset(b) for b in blocks]
    if len(blocks) != len(capacities):
        raise MatroidError("one capacity per block")
    if any(c < 0 for c in capacities):
        raise MatroidError("capacities must be nonnegative")
    where = {}
    for i, b in enumerate(blocks):
        for e in b:
            if e in where:
                raise MatroidError(f"element {e!r} lies in two blocks")
            where[e] = i
    ground = tuple(sorted(where, key=repr))

    def rank(X):
        counts: dict[int, int] = {}
        for e in X:
            if e not in where:
                raise MatroidError(f"element {e!r} is outside every block")
            counts[where[e]] = counts.get(where[e], 0) + 1
        return sum(min(c, capacities[i]) for i, c in counts.items())

    return RankOracle(ground, rank, "partition")


def direct_sum(oracles: Sequence[RankOracle]) -> RankOracle:
    owner = {}
    for i, M in enumerate(oracles):
        for e in M.ground:
            if e in owner:
                raise MatroidError(f"element {e!r} appears in two summands")
            owner[e] = i
    ground = tuple(e for M in oracles for e in M.ground)

    def rank(X):
        parts: list[set] = [set() for _ in oracles]
        for e in X:
            if e not in owner:
                raise MatroidError(f"element {e!r} is outside every summand")
            parts[owner[e]].add(e)
        return sum(M.rank(frozenset(p)) for M, p in zip(oracles, parts) if p)

    return RankOracle(ground, rank, "direct sum")


def k_shorten(oracle: RankOracle, k: int) -> RankOracle:
    return RankOracle(oracle.ground, lambda X: min(oracle.rank(X), k), f"{oracle.name} shortened to {k}")


# -- intersection --------------------------------------------------------------------


def _check_grounds(M1: RankOracle, M2: RankOracle) -> list:
    if set(M1.ground) != set(M2.ground):
        raise MatroidError("matroids must share one ground set")
    return sorted(M1.ground, key=_order_key)


def _order_key(e):
    return (0, e) if isinstance(e, int) else (1, repr(e))


def _exchange_graph(M1, M2, ground, I):
    inside = [x for x in ground if x in I]
    outside = [y for y in ground if y not in I]
    sources = {y for y in outside if M1.independent(I | {y})}
    sinks = {y for y in outside if M2.independent(I | {y})}
    succ: dict = {e: [] for e in ground}
    for y in outside:
        for x in inside:
            J = (I - {x}) | {y}
            if M1.independent(J):
                succ[x].append(y)
            if M2.independent(J):
                succ[y].append(x)
    return sources, sinks, succ


def matroid_intersection_max(M1: RankOracle, M2: RankOracle) -> CommonIndependentSet:
    """Maximum-cardinality common independent set by shortest augmenting paths."""
    ground = _check_grounds(M1, M2)
    I: frozenset = frozenset()
    while True:
        sources, sinks, succ = _exchange_graph(M1, M2, ground, I)
        prev = {y: None for y in ground if y in sources}
        queue = deque(y for y in ground if y in sources)
        end = None
        while queue:
            u = queue.popleft()
            if u in sinks:
                end = u
                break
            for v in succ[u]:
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if end is None:
            return CommonIndependentSet(I, len(I))
        path = []
        while end is not None:
            path.append(end)
            end = prev[end]
        I = I.symmetric_difference(path)


def matroid_intersection_min_cost(M1: RankOracle, M2: RankOracle, cost: Mapping, target: int):
    """Minimum-cost common independent set of size exactly ``target``.

    Successive shortest augmenting paths; lengths are ``(cost sum, hops)`` pairs,
    ties go to the smallest element. Returns None when ``target`` exceeds the
    maximum common size.
    """
    if target < 0:
        raise MatroidError("target must be nonnegative")
    ground = _check_grounds(M1, M2)
    cost = {e: Fraction(cost[e]) for e in ground}
    I: frozenset = frozenset()
    while len(I) < target:
        sources, sinks, succ = _exchange_graph(M1, M2, ground, I)
        weight = {e: (-cost[e] if e in I else cost[e], 1) for e in ground}
        dist = {e: weight[e] for e in ground if e in sources}
        prev = {e: None for e in dist}
        for _ in range(len(ground) + 1):
            changed = False
            for u in ground:
                if u not in dist:
                    continue
                du = dist[u]
                for v in succ[u]:
                    cand = (du[0] + weight[v][0], du[1] + 1)
                    if v not in dist or cand < dist[v]:
                        dist[v] = cand
                        prev[v] = u
                        changed = True
            if not changed:
                break
        ends = [e for e in ground if e in sinks and e in dist]
        if not ends:
            return None
        end = min(ends, key=lambda e: dist[e])
        path = []
        while end is not None:
            path.append(end)
            end = prev[end]
        I = I.symmetric_difference(path)
    return CommonIndependentSet(I, len(I), sum((cost[e] for e in I), Fraction(0)))
