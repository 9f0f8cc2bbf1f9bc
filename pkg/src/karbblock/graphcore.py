"""Directed multigraphs with stable arc ids, laminar families, and k-arborescence checks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from . import kernels


class GraphError(ValueError):
    pass


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise GraphError("float costs are not accepted; pass int, Fraction or 'p/q'")
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class Digraph:
    """Directed multigraph. Arc ids are never renumbered; deletion keeps survivors' ids."""

    nodes: frozenset
    arcs: Mapping[int, tuple[int, int]]
    costs: Mapping[int, Fraction] | None = None

    def __post_init__(self):
        for a, (u, v) in self.arcs.items():
            if u == v:
                raise GraphError(f"arc {a} is a self-loop at node {u}")
            if u not in self.nodes or v not in self.nodes:
                raise GraphError(f"arc {a} has an endpoint outside the node set")
        if self.costs is not None:
            if set(self.costs) != set(self.arcs):
                raise GraphError("costs must be given for exactly the arcs of the digraph")
            for a, c in self.costs.items():
                if c < 0:
                    raise GraphError(f"arc {a} has negative cost {c}")

    @classmethod
    def build(cls, nodes: Iterable[int], arcs: Iterable[tuple[int, int, int]], costs=None) -> "Digraph":
        """Build from ``(id, tail, head)`` triples; ``costs`` maps id to a rational."""
        arc_map: dict[int, tuple[int, int]] = {}
        for a, u, v in arcs:
            if a in arc_map:
                raise GraphError(f"duplicate arc id {a}")
            arc_map[int(a)] = (u, v)
        cost_map = None
        if costs is not None:
            cost_map = {int(a): as_fraction(c) for a, c in dict(costs).items()}
        return cls(frozenset(nodes), arc_map, cost_map)

    @classmethod
    def from_pairs(cls, nodes: Iterable[int], pairs: Iterable[tuple[int, int]], costs=None) -> "Digraph":
        pairs = list(pairs)
        cost_map = None if costs is None else dict(enumerate(costs))
        return cls.build(nodes, [(i, u, v) for i, (u, v) in enumerate(pairs)], cost_map)

    # -- queries ---------------------------------------------------------------

    @property
    def arc_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.arcs))

    def tail(self, a: int) -> int:
        return self.arcs[a][0]

    def head(self, a: int) -> int:
        return self.arcs[a][1]

    def cost(self, a: int) -> Fraction:
        if self.costs is None:
            raise GraphError("digraph carries no costs")
        return self.costs[a]

    def total_cost(self, arcs: Iterable[int]) -> Fraction:
        return sum((self.cost(a) for a in arcs), Fraction(0))

    def in_arcs(self, nodeset) -> list[int]:
        """Arcs entering ``nodeset`` (a node or a set of nodes), sorted by id."""
        W = _as_set(nodeset)
        return [a for a in self.arc_ids if self.arcs[a][1] in W and self.arcs[a][0] not in W]

    def out_arcs(self, nodeset) -> list[int]:
        W = _as_set(nodeset)
        return [a for a in self.arc_ids if self.arcs[a][0] in W and self.arcs[a][1] not in W]

    def induced_arcs(self, nodeset) -> list[int]:
        W = _as_set(nodeset)
        return [a for a in self.arc_ids if self.arcs[a][0] in W and self.arcs[a][1] in W]

    def in_degree(self, arcs: Iterable[int], nodeset) -> int:
        W = _as_set(nodeset)
        return sum(1 for a in arcs if self.arcs[a][1] in W and self.arcs[a][0] not in W)

    def next_node_id(self) -> int:
        return max(self.nodes, default=-1) + 1

    def next_arc_id(self) -> int:
        return max(self.arcs, default=-1) + 1

    # -- derived digraphs ------------------------------------------------------

    def delete_arcs(self, arcs: Iterable[int]) -> "Digraph":
        gone = set(arcs)
        return self.keep_arcs(a for a in self.arcs if a not in gone)

    def keep_arcs(self, arcs: Iterable[int]) -> "Digraph":
        keep = sorted(set(arcs))
        costs = None if self.costs is None else {a: self.costs[a] for a in keep}
        return Digraph(self.nodes, {a: self.arcs[a] for a in keep}, costs)

    def subgraph(self, nodeset) -> "Digraph":
        W = frozenset(_as_set(nodeset))
        keep = self.induced_arcs(W)
        costs = None if self.costs is None else {a: self.costs[a] for a in keep}
        return Digraph(W, {a: self.arcs[a] for a in keep}, costs)

    def with_costs(self, costs: Mapping[int, object] | None) -> "Digraph":
        cost_map = None if costs is None else {a: as_fraction(costs[a]) for a in self.arcs}
        return Digraph(self.nodes, dict(self.arcs), cost_map)

    def without_in_arcs(self, node: int) -> "Digraph":
        return self.delete_arcs(self.in_arcs(node))

    def __repr__(self) -> str:
        return f"Digraph(|V|={len(self.nodes)}, |A|={len(self.arcs)})"


def _as_set(nodeset):
    if isinstance(nodeset, (set, frozenset)):
        return nodeset
    if isinstance(nodeset, int):
        return {nodeset}
    return set(nodeset)


# -- laminar families ----------------------------------------------------------


def _member_key(W: frozenset):
    return (len(W), tuple(sorted(W)))


@dataclass(frozen=True, eq=False)
class LaminarFamily:
    universe: frozenset
    members: tuple[frozenset, ...]
    parent: Mapping[frozenset, frozenset | None] = field(default_factory=dict)

    @classmethod
    def build(cls, universe: Iterable[int], members: Iterable[Iterable[int]] = ()) -> "LaminarFamily":
        U = frozenset(universe)
        uniq = {frozenset(M) for M in members}
        for M in uniq:
            if not M:
                raise GraphError("laminar members must be nonempty")
            if not M <= U:
                raise GraphError(f"member {sorted(M)} is not inside the universe")
        ordered = tuple(sorted(uniq, key=_member_key))
        for X, Y in combinations(ordered, 2):
            if X & Y and not (X <= Y or Y <= X):
                raise GraphError(f"members {sorted(X)} and {sorted(Y)} cross")
        parent = {}
        for i, M in enumerate(ordered):
            # members are sorted by size, so the first strict superset is the smallest one
            parent[M] = next((P for P in ordered[i + 1:] if M < P), None)
        return cls(U, ordered, parent)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, W) -> bool:
        return frozenset(W) in self.parent

    def normalized(self, universe: Iterable[int] | None = None) -> "LaminarFamily":
        U = self.universe if universe is None else frozenset(universe)
        extra = [U] + [frozenset([v]) for v in U]
        return LaminarFamily.build(U, list(self.members) + extra)

    def within(self, W) -> list[frozenset]:
        """``L[W]``: members contained in ``W`` (``W`` itself included when present)."""
        W = frozenset(W)
        return [M for M in self.members if M <= W]

    def children(self, W) -> list[frozenset]:
        """Maximal members of ``L[W] - W``."""
        W = frozenset(W)
        inner = [M for M in self.members if M < W]
        return [M for M in inner if not any(M < P for P in inner)]

    def compatible_subpartitions(self, W):
        """Subpartitions of ``W`` whose parts are unions of children of ``W`` (the empty one included)."""
        kids = self.children(W)
        yield from (tuple(frozenset().union(*block) for block in blocks)
                    for blocks in set_subpartitions(kids))

    def without(self, predicate) -> "LaminarFamily":
        return LaminarFamily.build(self.universe, [M for M in self.members if not predicate(M)])

    def is_laminar_pairwise(self) -> bool:
        return all(not (X & Y) or X <= Y or Y <= X for X, Y in combinations(self.members, 2))

    def __repr__(self) -> str:
        return f"LaminarFamily({[sorted(M) for M in self.members]})"


def set_partitions(items):
    """All partitions of ``items`` into nonempty blocks, as lists of lists."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def set_subpartitions(items):
    """Partitions of every subset of ``items``."""
    items = list(items)
    for r in range(len(items) + 1):
        for chosen in combinations(items, r):
            yield from set_partitions(chosen)


# -- extensions and contractions -------------------------------------------------


def build_extension(D: Digraph, alpha: int, root: int | None = None) -> tuple[Digraph, dict[int, int]]:
    """Add a new node with ``alpha`` parallel arcs to every node. Returns (D+, new arc id -> head)."""
    if alpha < 1:
        raise GraphError("alpha must be positive")
    s = D.next_node_id() if root is None else root
    if s in D.nodes:
        raise GraphError(f"extension root {s} is already a node")
    arcs = dict(D.arcs)
    added: dict[int, int] = {}
    nxt = D.next_arc_id()
    for v in sorted(D.nodes):
        for _ in range(alpha):
            arcs[nxt] = (s, v)
            added[nxt] = v
            nxt += 1
    return Digraph(D.nodes | {s}, arcs, None), added


def build_cost_extension(D: Digraph, alpha: int, beta, root: int | None = None) -> tuple[Digraph, dict[int, int]]:
    if D.costs is None:
        raise GraphError("cost extension needs arc costs")
    beta = as_fraction(beta)
    if beta < 0:
        raise GraphError("beta must be nonnegative")
    Dp, added = build_extension(D, alpha, root)
    costs = dict(D.costs)
    costs.update({a: beta for a in added})
    return Dp.with_costs(costs), added


def extension_root(Dplus: Digraph, added: Mapping[int, int]) -> int:
    return Dplus.tail(next(iter(added)))


def contract_to_root(Dplus: Digraph, W, root_name: int | None = None) -> Digraph:
    """Contract everything outside ``W`` into one root; arcs entering ``W`` keep their ids."""
    W = frozenset(W)
    if not W:
        raise GraphError("cannot contract onto an empty set")
    if not W <= Dplus.nodes:
        raise GraphError("W must be a set of nodes of the digraph")
    sW = Dplus.next_node_id() if root_name is None else root_name
    if sW in W:
        raise GraphError("contracted root name collides with a node of W")
    arcs = {}
    for a in Dplus.arc_ids:
        u, v = Dplus.arcs[a]
        if v not in W:
            continue
        arcs[a] = (u, v) if u in W else (sW, v)
    costs = None if Dplus.costs is None else {a: Dplus.costs[a] for a in arcs}
    return Digraph(W | {sW}, arcs, costs)


# -- flows ---------------------------------------------------------------------


def max_flow(arcs: Iterable[tuple[int, int, object]], source: int, sink: int, limit=None):
    """Edmonds-Karp on aggregated capacities.

    Returns ``(value, sink_side)`` where ``sink_side`` is the inclusionwise minimal
    set containing ``sink`` whose entering capacity equals ``value`` (nodes that can
    still reach the sink in the residual graph). With ``limit`` the search stops once
    the flow reaches it and ``sink_side`` is None.
    """
    cap: dict[int, dict[int, object]] = {}
    for u, v, c in arcs:
        if u == v or c == 0:
            continue
        cap.setdefault(u, {}).setdefault(v, 0)
        cap[u][v] += c
        cap.setdefault(v, {}).setdefault(u, 0)
    cap.setdefault(source, {})
    cap.setdefault(sink, {})
    value = 0
    while limit is None or value < limit:
        prev = {source: None}
        queue = deque([source])
        while queue and sink not in prev:
            u = queue.popleft()
            for v in sorted(cap[u]):
                if v not in prev and cap[u][v] > 0:
                    prev[v] = u
                    queue.append(v)
        if sink not in prev:
            break
        path = []
        v = sink
        while prev[v] is not None:
            path.append((prev[v], v))
            v = prev[v]
        push = min(cap[u][v] for u, v in path)
        if limit is not None:
            push = min(push, limit - value)
        for u, v in path:
            cap[u][v] -= push
            cap[v][u] += push
        value += push
    if limit is not None and value >= limit:
        return value, None
    reach = {sink}
    queue = deque([sink])
    while queue:
        v = queue.popleft()
        for u in cap:
            if u not in reach and cap[u].get(v, 0) > 0:
                reach.add(u)
                queue.append(u)
    return value, frozenset(reach)


def connectivity(D: Digraph, arcs: Iterable[int], source: int, target: int, limit=None) -> int:
    value, _ = max_flow(((D.tail(a), D.head(a), 1) for a in arcs), source, target, limit)
    return value


# -- arborescence checks ---------------------------------------------------------


@dataclass(frozen=True)
class KArborescence:
    arcs: frozenset
    k: int
    root: int | None
    root_vector: Mapping[int, int]
    cost: Fraction | None = None

    def __len__(self) -> int:
        return len(self.arcs)


def _arc_arrays(D: Digraph, arcs: Iterable[int], nodes):
    index = {v: i for i, v in enumerate(sorted(nodes))}
    arcs = sorted(arcs)
    tails = np.array([index[D.tail(a)] for a in arcs], dtype=np.int64)
    heads = np.array([index[D.head(a)] for a in arcs], dtype=np.int64)
    return index, tails, heads


def is_rooted_k_arborescence(D: Digraph, F: Iterable[int], s: int, k: int) -> bool:
    if s not in D.nodes:
        raise GraphError(f"root {s} is not a node")
    F = list(F)
    if len(set(F)) != len(F) or any(a not in D.arcs for a in F):
        return False
    n = len(D.nodes)
    if len(F) != k * (n - 1):
        return False
    indeg = {v: 0 for v in D.nodes}
    for a in F:
        indeg[D.head(a)] += 1
    if indeg[s] != 0 or any(indeg[v] != k for v in D.nodes if v != s):
        return False
    index, tails, heads = _arc_arrays(D, F, D.nodes)
    return bool(kernels.rooted_k_connected(n, index[s], k, tails, heads))


def is_k_arborescence(D: Digraph, F: Iterable[int], k: int, nodes=None) -> bool:
    """Unrooted check on the node set ``nodes`` (default: all nodes of ``D``)."""
    nodes = D.nodes if nodes is None else frozenset(nodes)
    F = list(F)
    if len(set(F)) != len(F):
        return False
    if any(D.tail(a) not in nodes or D.head(a) not in nodes for a in F):
        return False
    n = len(nodes)
    if len(F) != k * (n - 1):
        return False
    indeg = {v: 0 for v in nodes}
    for a in F:
        indeg[D.head(a)] += 1
    if any(d > k for d in indeg.values()):
        return False
    if n == 1:
        return True
    # F is a k-arborescence iff adding k - indeg(v) arcs from a fresh root yields a rooted one
    index, tails, heads = _arc_arrays(D, F, nodes)
    extra_t, extra_h = [], []
    for v in sorted(nodes):
        extra_t += [n] * (k - indeg[v])
        extra_h += [index[v]] * (k - indeg[v])
    tails = np.concatenate([tails, np.array(extra_t, dtype=np.int64)])
    heads = np.concatenate([heads, np.array(extra_h, dtype=np.int64)])
    return bool(kernels.rooted_k_connected(n + 1, n, k, tails, heads))


def root_vector(D: Digraph, F: Iterable[int], k: int, nodes=None) -> dict[int, int]:
    nodes = D.nodes if nodes is None else nodes
    indeg = {v: 0 for v in nodes}
    for a in F:
        indeg[D.head(a)] += 1
    return {v: k - indeg[v] for v in sorted(nodes)}


def make_k_arborescence(D: Digraph, F: Iterable[int], k: int, root: int | None = None) -> KArborescence:
    F = frozenset(F)
    cost = D.total_cost(F) if D.costs is not None else None
    return KArborescence(F, k, root, root_vector(D, F, k), cost)


def is_L_tight(D: Digraph, F: Iterable[int], L: LaminarFamily, s: int, k: int) -> bool:
    """``F[W]`` is a k-arborescence of ``D[W]`` for every member ``W``."""
    F = list(F)
    if not is_rooted_k_arborescence(D, F, s, k):
        raise GraphError("F is not a rooted k-arborescence")
    for W in L:
        if s not in W:
            if D.in_degree(F, W) != k:
                return False
            continue
        inside = [a for a in F if D.tail(a) in W and D.head(a) in W]
        if not is_k_arborescence(D, inside, k, W):
            return False
    return True
