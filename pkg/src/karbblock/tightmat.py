"""Matroids of L-tight k-arborescences and the set functions behind them.

For a member W, the matroid M_W lives on the arcs entering W in the extended
digraph; its bases are the k-sets that extend to an L[W]-tight arborescence of
the digraph with everything outside W contracted into one root. Ranks are
computed with one weighted arborescence call. The recursive subpartition
formula, the p functions and the mandatory-arc gadget are kept as cross-checks.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from .arb import exists_L_tight, rooted_min_cost_arcs, tightness_costs
from .graphcore import (
    Digraph,
    GraphError,
    LaminarFamily,
    build_extension,
    contract_to_root,
    set_partitions,
    set_subpartitions,
)
from .matroid import RankOracle
from .oracle import enumerate_k_arbs, enumerate_rooted_k_arbs, optimal_sets


class NoTightArborescenceError(GraphError):
    pass


class RecursionBoundError(RuntimeError):
    pass


@dataclass(eq=False)
class TightMatroidContext:
    """Extended digraph plus a normalized laminar family over the original nodes."""

    D: Digraph
    L: LaminarFamily
    k: int
    alpha: int | None = None
    Dplus: Digraph = field(init=False)
    root: int = field(init=False)
    added: dict = field(init=False)

    def __post_init__(self):
        self.L = LaminarFamily.build(self.D.nodes, list(self.L)).normalized()
        alpha = len(self.D.arcs) + self.k if self.alpha is None else self.alpha
        if alpha < self.k:
            raise GraphError("the extension needs at least k parallel root arcs")
        self.alpha = alpha
        self.Dplus, self.added = build_extension(self.D.with_costs(None), alpha)
        self.root = next(iter(self.Dplus.nodes - self.D.nodes))
        self._cache: dict = {}
        self._lock = threading.Lock()
        if not exists_L_tight(self.Dplus, self.root, self.k, self.L):
            raise NoTightArborescenceError("the digraph has no L-tight k-arborescence")

    @classmethod
    def _raw(cls, parent: "TightMatroidContext", Dplus: Digraph) -> "TightMatroidContext":
        ctx = object.__new__(cls)
        ctx.D, ctx.L, ctx.k, ctx.alpha = parent.D, parent.L, parent.k, parent.alpha
        ctx.Dplus, ctx.root, ctx.added = Dplus, parent.root, parent.added
        ctx._cache, ctx._lock = {}, threading.Lock()
        return ctx

    def without(self, arcs: Iterable[int]) -> "TightMatroidContext":
        """Same family on the extended digraph minus ``arcs``; tightness is not required."""
        return TightMatroidContext._raw(self, self.Dplus.delete_arcs(arcs))

    def in_star(self, W) -> list[int]:
        return self.Dplus.in_arcs(frozenset(W))

    def inner_arcs(self, W) -> list[int]:
        return self.Dplus.induced_arcs(frozenset(W))

    def contracted(self, W) -> tuple[Digraph, int]:
        sW = self.Dplus.next_node_id()
        return contract_to_root(self.Dplus, W, sW), sW

    def has_tight(self, W) -> bool:
        DW, sW = self.contracted(W)
        return exists_L_tight(DW, sW, self.k, self.L.within(W))

    def rank(self, W, E) -> int:
        return rank_MW(self, W, E)

    def oracle(self, W) -> RankOracle:
        W = frozenset(W)
        return RankOracle(tuple(self.in_star(W)), lambda E: rank_MW(self, W, E), f"M_{sorted(W)}")


def rank_MW(ctx: TightMatroidContext, W, E) -> int:
    """Largest overlap of ``E`` with an L[W]-tight arborescence of the contraction onto W."""
    W, E = frozenset(W), frozenset(E)
    if W not in ctx.L:
        raise GraphError(f"{sorted(W)} is not a member of the family")
    star = set(ctx.in_star(W))
    if not E <= star:
        raise GraphError("E must consist of arcs entering W")
    key = ("MW", W, E)
    with ctx._lock:
        if key in ctx._cache:
            return ctx._cache[key]
    DW, sW = ctx.contracted(W)
    members = ctx.L.within(W)
    scale = len(DW.arcs) + 1
    base = tightness_costs(DW, members)
    costs = {a: scale * c - (a in E) for a, c in base.items()}
    found = rooted_min_cost_arcs(DW, sW, ctx.k, costs)
    r = -1 if found is None else scale * ctx.k * len(members) - found[1]
    if r < 0:
        raise NoTightArborescenceError(f"no L[W]-tight arborescence for W = {sorted(W)}")
    assert r <= min(ctx.k, len(E))
    with ctx._lock:
        ctx._cache[key] = r
    return r


def rank_plus(ctx: TightMatroidContext, W, F, rank=rank_MW) -> int:
    """Direct sum of the child matroids of ``W`` evaluated on ``F``."""
    F = set(F)
    total = 0
    for Wi in ctx.L.children(W):
        part = F & set(ctx.in_star(Wi))
        if part:
            total += rank(ctx, Wi, part)
    return total


def rank_recursive(ctx: TightMatroidContext, W, E, max_children: int = 7) -> int:
    """Rank through the minimum over compatible subpartitions, recursing into children."""
    W, E = frozenset(W), frozenset(E)
    if len(W) == 1:
        return min(ctx.k, len(E))
    key = ("rec", W, E)
    with ctx._lock:
        if key in ctx._cache:
            return ctx._cache[key]
    kids = ctx.L.children(W)
    if len(kids) > max_children:
        raise RecursionBoundError(
            f"{len(kids)} children exceed the subpartition bound {max_children}; use rank_MW")
    pool = set(E) | set(ctx.inner_arcs(W))
    best = None
    for parts in ctx.L.compatible_subpartitions(W):
        total = 0
        for X in parts:
            entering = {a for a in pool if ctx.Dplus.head(a) in X and ctx.Dplus.tail(a) not in X}
            total += rank_plus(ctx, W, entering, lambda c, Wi, P: rank_recursive(c, Wi, P, max_children))
        val = total - ctx.k * (len(parts) - 1)
        best = val if best is None else min(best, val)
    with ctx._lock:
        ctx._cache[key] = best
    return best


def compatible_sets(L: LaminarFamily, W) -> list[frozenset]:
    kids = L.children(W)
    return [frozenset().union(*c) for r in range(1, len(kids) + 1) for c in combinations(kids, r)]


# -- p and its truncation ---------------------------------------------------------------


class PFunction:
    """``p(E)`` on arcs leaving ``s`` for a digraph with rank-k matroids on the other in-stars."""

    def __init__(self, D: Digraph, s: int, k: int, matroids: Mapping[int, RankOracle], max_nodes: int = 9):
        if len(D.nodes) - 1 > max_nodes:
            raise RecursionBoundError(f"p is exhaustive; |V - s| = {len(D.nodes) - 1} > {max_nodes}")
        self.D, self.s, self.k = D, s, k
        self.matroids = dict(matroids)
        for v in D.nodes - {s}:
            M = self.matroids[v]
            if M(D.in_arcs(v)) != k:
                raise GraphError(f"matroid at {v} must have rank {k}")
        self.ground = tuple(D.out_arcs(s))
        self.others = sorted(D.nodes - {s})
        self._cache: dict = {}

    def r_plus(self, F) -> int:
        F = set(F)
        return sum(self.matroids[v](F & set(self.D.in_arcs(v))) for v in self.others if F & set(self.D.in_arcs(v)))

    def deficit(self, E, X) -> int:
        """``k - r+(arcs of D - E entering X)``."""
        E, X = set(E), set(X)
        entering = [a for a in self.D.arc_ids
                    if a not in E and self.D.head(a) in X and self.D.tail(a) not in X]
        return self.k - self.r_plus(entering)

    def _subsets(self):
        for r in range(1, len(self.others) + 1):
            yield from combinations(self.others, r)

    def __call__(self, E) -> int:
        E = frozenset(E)
        if ("p", E) not in self._cache:
            self._cache[("p", E)] = max(self.deficit(E, X) for X in self._subsets())
        return self._cache[("p", E)]

    def truncation(self, E) -> int:
        """Best subpartition sum of deficits (0 for the empty subpartition)."""
        E = frozenset(E)
        n = len(self.others)
        g = {}
        for mask in range(1, 1 << n):
            g[mask] = self.deficit(E, [v for i, v in enumerate(self.others) if mask >> i & 1])
        best = [0] * (1 << n)
        for S in range(1, 1 << n):
            low = S & -S
            val = best[S ^ low]
            rest = S ^ low
            sub = rest
            while True:
                X = sub | low
                val = max(val, g[X] + best[S ^ X])
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            best[S] = val
        return best[(1 << n) - 1]

    def partition_truncation(self, E) -> int:
        """``max`` of ``sum p(H)`` over partitions of ``E`` (the textbook upper truncation)."""
        E = list(E)
        if not E:
            return self(())
        return max(sum(self(H) for H in part) for part in set_partitions(E))

    def separable(self, E) -> bool:
        E = list(E)
        pe = self(E)
        return any(len(part) >= 2 and pe <= sum(self(H) for H in part) for part in set_partitions(E))

    def near_supermodular_violations(self) -> list[tuple[frozenset, frozenset]]:
        subsets = [frozenset(c) for r in range(1, len(self.ground) + 1) for c in combinations(self.ground, r)]
        ok = [E for E in subsets if not self.separable(E)]
        bad = []
        for X, Y in combinations(ok, 2):
            if X & Y and self(X) + self(Y) > self(X & Y) + self(X | Y):
                bad.append((X, Y))
        return bad

    def truncation_supermodular_violations(self) -> list[tuple[frozenset, frozenset]]:
        subsets = [frozenset(c) for r in range(len(self.ground) + 1) for c in combinations(self.ground, r)]
        t = {E: self.truncation(E) for E in subsets}
        return [(X, Y) for X, Y in combinations(subsets, 2) if t[X] + t[Y] > t[X & Y] + t[X | Y]]

    # diagnostics for the root-arc matroid

    def conditions(self) -> tuple[bool, bool]:
        """(every nonempty X has r+ >= k, every subpartition of V - s has deficit sum <= k)."""
        a = all(self.deficit((), X) <= 0 for X in self._subsets())
        inner = [e for e in self.D.arc_ids if self.D.tail(e) != self.s]
        b = all(sum(self._inner_deficit(inner, X) for X in parts) <= self.k
                for parts in set_subpartitions(self.others))
        return a, b

    def _inner_deficit(self, inner, X) -> int:
        X = set(X)
        return self.k - self.r_plus([e for e in inner if self.D.head(e) in X and self.D.tail(e) not in X])

    def root_rank(self, E) -> int:
        """Subpartition formula for the rank of ``E`` in the root-arc matroid."""
        pool = set(E) | {e for e in self.D.arc_ids if self.D.tail(e) != self.s}
        best = None
        for parts in set_subpartitions(self.others):
            total = 0
            for X in parts:
                X = set(X)
                total += self.r_plus([e for e in pool if self.D.head(e) in X and self.D.tail(e) not in X])
            val = total - self.k * (len(parts) - 1)
            best = val if best is None else min(best, val)
        return best

    def restricted_root_bases(self) -> set[frozenset]:
        """Root-arc sets of size k of the matroid-restricted s-rooted k-arborescences, by enumeration."""
        out = set()
        for F in enumerate_rooted_k_arbs(self.D, self.s, self.k):
            I = frozenset(a for a in F if self.D.tail(a) == self.s)
            if len(I) != self.k:
                continue
            if all(self.matroids[v].independent(set(F) & set(self.D.in_arcs(v))) for v in self.others):
                out.add(I)
        return out


# -- mandatory arcs and root vectors -----------------------------------------------------


def mandatory_arc_transform(D: Digraph, L: LaminarFamily, a: int, k: int, s: int):
    """Replace ``a = uv`` by a gadget on a new node that forces every tight arborescence through it."""
    u, v = D.arcs[a]
    if s in (u, v):
        raise GraphError("the arc must not touch the root")
    if frozenset([v]) not in L:
        raise GraphError("the family must contain the head singleton")
    x = D.next_node_id()
    arcs = {b: e for b, e in D.arcs.items() if b != a}
    nxt = D.next_arc_id()
    gadget = [(u, x), (x, v)] + [(v, x)] * (k - 1)
    costs = None if D.costs is None else {b: c for b, c in D.costs.items() if b != a}
    for i, (t, h) in enumerate(gadget):
        arcs[nxt + i] = (t, h)
        if costs is not None:
            costs[nxt + i] = D.costs[a] if i == 0 else 0
    D2 = Digraph(D.nodes | {x}, arcs, costs)
    members = [W | {x} if v in W else W for W in L]
    return D2, LaminarFamily.build(D2.nodes, members)


def root_vectors_of_optima(D: Digraph, k: int, **bounds) -> set[tuple[int, ...]]:
    """Root vectors (over sorted nodes) of all minimum-cost k-arborescences, by enumeration."""
    _, optima = optimal_sets(D, enumerate_k_arbs(D, k, **bounds))
    nodes = sorted(D.nodes)
    out = set()
    for F in optima:
        indeg = {v: 0 for v in nodes}
        for a in F:
            indeg[D.head(a)] += 1
        out.add(tuple(k - indeg[v] for v in nodes))
    return out


def exchange_property(vectors: set[tuple[int, ...]]) -> bool:
    """Integer base exchange: q(v) > q'(v) admits u with q(u) < q'(u) and q - e_v + e_u in the set."""
    for q, q2 in combinations(sorted(vectors), 2):
        for a, b in ((q, q2), (q2, q)):
            for v in range(len(a)):
                if a[v] <= b[v]:
                    continue
                if not any(a[u] < b[u] and _moved(a, v, u) in vectors for u in range(len(a))):
                    return False
    return True


def _moved(q, v, u):
    out = list(q)
    out[v] -= 1
    out[u] += 1
    return tuple(out)
