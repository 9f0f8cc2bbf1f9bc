"""Minimum transversals of optimal and L-tight k-arborescences.

The search first tries every arc set of size below k; when none blocks, the
answer is read off the cheapest disjoint pair (Z1, Z2) of some member W under
the count f_W, minus k - 1 arcs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .arb import find_L_tight, min_cost_rooted_k_arb, rooted_min_cost_arcs, tightness_costs
from .graphcore import Digraph, GraphError, LaminarFamily, build_cost_extension
from .optstruct import OptimalityStructure, optimality_structure

DEFAULT_MAX_PAIR_SET = 14

EMPTY_FAMILY = "emptyFamily"
MANDATORY_ARC = "mandatoryArc"
SMALL_SEARCH = "smallSearch"
F_PAIR_FORMULA = "fPairFormula"


class ExhaustiveBoundError(RuntimeError):
    """The exact pair search would exceed the configured member size."""


class VerificationError(AssertionError):
    pass


@dataclass(frozen=True)
class FPairWitness:
    W: tuple[int, ...]
    Z1: tuple[int, ...]
    Z2: tuple[int, ...]
    value: int
    E1: tuple[int, ...]
    E2: tuple[int, ...]

    def to_json(self) -> dict:
        return {"W": list(self.W), "Z1": list(self.Z1), "Z2": list(self.Z2), "value": self.value,
                "E1": list(self.E1), "E2": list(self.E2)}


@dataclass(frozen=True)
class TransversalResult:
    arcs: tuple[int, ...]
    provenance: str
    witness: FPairWitness | None = None
    opt_cost: Fraction | None = None
    structure: OptimalityStructure | None = None

    @property
    def size(self) -> int:
        return len(self.arcs)


# -- f_W ---------------------------------------------------------------------------------


def _members(L: LaminarFamily | Iterable) -> list[frozenset]:
    return list(L.members if isinstance(L, LaminarFamily) else L)


def f_W(D: Digraph, L, W, Z) -> tuple[int, tuple[int, ...]]:
    """Arcs of D[W] entering Z that leave no member of L[W] meeting Z; by definition."""
    W, Z = frozenset(W), frozenset(Z)
    if not Z <= W:
        raise GraphError("Z must be a subset of W")
    inner = [M for M in _members(L) if M <= W and M & Z]
    counted = []
    for a in D.induced_arcs(W):
        u, v = D.arcs[a]
        if v not in Z or u in Z:
            continue
        if any(u in M and v not in M for M in inner):
            continue
        counted.append(a)
    return len(counted), tuple(counted)


def shadow_sets(D: Digraph, L, W) -> dict[int, frozenset]:
    """``T_e``: the largest member of L[W] holding the tail but not the head of ``e``."""
    W = frozenset(W)
    inner = [M for M in _members(L) if M <= W]
    out = {}
    for a in D.induced_arcs(W):
        u, v = D.arcs[a]
        chain = [M for M in inner if u in M and v not in M]
        T = max(chain, key=len) if chain else frozenset([u])
        assert T != W
        out[a] = T
    return out


def f_W_shadow(D: Digraph, L, W, Z) -> int:
    Z = frozenset(Z)
    return sum(1 for a, T in shadow_sets(D, L, W).items() if D.head(a) in Z and not T & Z)


def f_table(D: Digraph, L, W) -> tuple[np.ndarray, list[int]]:
    """f_W on every subset of W, indexed by bitmask over ``sorted(W)``."""
    nodes = sorted(W)
    bit = {v: i for i, v in enumerate(nodes)}
    classes: dict[tuple[int, int], int] = {}
    for a, T in shadow_sets(D, L, W).items():
        key = (bit[D.head(a)], sum(1 << bit[t] for t in T))
        classes[key] = classes.get(key, 0) + 1
    heads = np.array([h for h, _ in classes], dtype=np.int64)
    tmasks = np.array([t for _, t in classes], dtype=np.int64)
    mult = np.array(list(classes.values()), dtype=np.int64)
    return kernels.f_table(len(nodes), heads, tmasks, mult), nodes


def _nodes_of(mask: int, nodes: list[int]) -> tuple[int, ...]:
    return tuple(v for i, v in enumerate(nodes) if mask >> i & 1)


def min_f_pair(D: Digraph, L, W, max_size: int = DEFAULT_MAX_PAIR_SET) -> FPairWitness:
    """Exact minimum of f_W(Z1) + f_W(Z2) over disjoint nonempty Z1, Z2 within W.

    Ties go to the smallest Z1 bitmask, then the smallest Z2 bitmask.
    """
    W = frozenset(W)
    if len(W) < 2:
        raise GraphError("W needs at least two nodes")
    if len(W) > max_size:
        raise ExhaustiveBoundError(
            f"instance too large for exact pair search: |W| = {len(W)} > {max_size}")
    table, nodes = f_table(D, L, W)
    value, z1, z2 = kernels.min_disjoint_pair(table, len(nodes))
    Z1, Z2 = _nodes_of(int(z1), nodes), _nodes_of(int(z2), nodes)
    _, E1 = f_W(D, L, W, Z1)
    _, E2 = f_W(D, L, W, Z2)
    assert len(E1) + len(E2) == int(value)
    return FPairWitness(tuple(nodes), Z1, Z2, int(value), E1, E2)


def best_f_pair(D: Digraph, L: LaminarFamily, max_size: int = DEFAULT_MAX_PAIR_SET,
                jobs: int = 1) -> FPairWitness | None:
    targets = [W for W in L if len(W) >= 2]
    if jobs > 1 and len(targets) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            found = list(pool.map(lambda W: min_f_pair(D, L, W, max_size), targets))
    else:
        found = [min_f_pair(D, L, W, max_size) for W in targets]
    if not found:
        return None
    return min(found, key=lambda w: (w.value, len(w.W), w.W, w.Z1, w.Z2))


# -- transversal search ----------------------------------------------------------------


def _context(D: Digraph, L: LaminarFamily | None) -> LaminarFamily:
    members = [] if L is None else [M & D.nodes for M in L if M & D.nodes]
    return LaminarFamily.build(D.nodes, members).normalized()


def is_transversal(D: Digraph, s: int, k: int, L: LaminarFamily | None, H: Iterable[int]) -> bool:
    return find_L_tight(D.delete_arcs(H), s, k, L) is None


def relevant_arcs(D: Digraph, s: int, k: int, L: LaminarFamily, protected=frozenset()) -> list[int]:
    """Unprotected arcs lying in at least one L-tight rooted k-arborescence."""
    members = [W for W in L if s not in W]
    base = tightness_costs(D, members)
    scale = len(D.arcs) + 1
    goal = scale * k * len(members)
    out = []
    for a in D.arc_ids:
        if a in protected or D.head(a) == s:
            continue
        costs = {b: scale * c - (b == a) for b, c in base.items()}
        found = rooted_min_cost_arcs(D, s, k, costs)
        if found is not None and found[1] == goal - 1:
            out.append(a)
    return out


def small_transversal(D: Digraph, s: int, k: int, L: LaminarFamily | None, max_size: int,
                      protected=frozenset()) -> tuple[int, ...] | None:
    """Smallest transversal with at most ``max_size`` arcs, searched by increasing size."""
    L = _context(D, L)
    first = find_L_tight(D, s, k, L)
    if first is None:
        return ()
    pool = [first]
    candidates = relevant_arcs(D, s, k, L, frozenset(protected))
    for r in range(1, max_size + 1):
        for H in combinations(candidates, r):
            Hs = set(H)
            # every L-tight arborescence seen so far must be hit
            if any(not Hs & F for F in pool):
                continue
            F = find_L_tight(D.delete_arcs(H), s, k, L)
            if F is None:
                return H
            pool.append(F)
    return None


def minimum_transversal_L_tight(D: Digraph, s: int, k: int, L: LaminarFamily | None,
                                protected=frozenset(), max_pair_set: int = DEFAULT_MAX_PAIR_SET,
                                jobs: int = 1) -> TransversalResult:
    """Minimum arc set meeting every L-tight s-rooted k-arborescence; ``protected`` arcs are never used."""
    if len(D.nodes) == 1:
        raise ValueError("on one node the empty k-arborescence cannot be blocked")
    for M in L or ():
        if s in M and M != D.nodes and len(M) > 1:
            raise GraphError(f"member {sorted(M)} contains the root; tightness is only defined off the root")
    L = _context(D, L)
    protected = frozenset(protected)
    H = small_transversal(D, s, k, L, k - 1, protected)
    if H == ():
        return TransversalResult((), EMPTY_FAMILY)
    if H is not None:
        return TransversalResult(tuple(sorted(H)), SMALL_SEARCH)
    wit = best_f_pair(D, L, max_pair_set, jobs)
    union = sorted(set(wit.E1) | set(wit.E2))
    assert len(union) == wit.value
    H = tuple(union[: len(union) - (k - 1)])
    if protected & set(H):
        raise VerificationError("formula transversal uses a protected arc")
    if not is_transversal(D, s, k, L, H):
        raise VerificationError(f"formula set {H} does not block every L-tight arborescence")
    return TransversalResult(H, F_PAIR_FORMULA, wit)


def _from_structure(Dr: Digraph, s: int, k: int, st: OptimalityStructure, protected: frozenset,
                    max_pair_set: int, jobs: int) -> TransversalResult:
    if st.A1:
        return TransversalResult((min(st.A1),), MANDATORY_ARC, None, st.opt_cost, st)
    res = minimum_transversal_L_tight(Dr.delete_arcs(st.A0), s, k, st.L, protected, max_pair_set, jobs)
    return TransversalResult(res.arcs, res.provenance, res.witness, st.opt_cost, st)


def minimum_transversal_rooted(D: Digraph, s: int, k: int, costs: Mapping | None = None,
                               max_pair_set: int = DEFAULT_MAX_PAIR_SET, jobs: int = 1) -> TransversalResult:
    """Minimum arc set meeting every cheapest s-rooted k-arborescence."""
    if len(D.nodes) == 1:
        raise ValueError("on one node the empty k-arborescence cannot be blocked")
    if costs is not None or D.costs is None:
        D = D.with_costs(costs if costs is not None else {a: 0 for a in D.arcs})
    Dr = D.without_in_arcs(s)
    if min_cost_rooted_k_arb(Dr, s, k) is None:
        return TransversalResult((), EMPTY_FAMILY)
    st = optimality_structure(Dr, s, k)
    return _from_structure(Dr, s, k, st, frozenset(), max_pair_set, jobs)


def minimum_transversal(D: Digraph, k: int, costs: Mapping | None = None,
                        max_pair_set: int = DEFAULT_MAX_PAIR_SET, jobs: int = 1) -> TransversalResult:
    """Minimum arc set meeting every cheapest k-arborescence (any root vector)."""
    if len(D.nodes) == 1:
        raise ValueError("on one node the empty k-arborescence cannot be blocked")
    if costs is not None or D.costs is None:
        D = D.with_costs(costs if costs is not None else {a: 0 for a in D.arcs})
    beta = sum(D.costs.values(), Fraction(0)) + 1
    Dp, added = build_cost_extension(D, len(D.arcs) + k, beta)
    s = next(iter(Dp.nodes - D.nodes))
    best = min_cost_rooted_k_arb(Dp, s, k)
    if sum(1 for a in best.arcs if a in added) != k:
        return TransversalResult((), EMPTY_FAMILY)
    st = optimality_structure(Dp, s, k)
    if not st.A1 <= D.arcs.keys():
        raise VerificationError("a root arc of the extension came out mandatory")
    res = _from_structure(Dp, s, k, st, frozenset(added), max_pair_set, jobs)
    return TransversalResult(res.arcs, res.provenance, res.witness, st.opt_cost - k * beta, st)
