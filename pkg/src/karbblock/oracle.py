"""Brute-force ground truth: enumeration of k-arborescences and minimum hitting sets.

Enumeration never calls the matroid or LP machinery; the only shared pieces are
the digraph container and the flow-based validity checks.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

from .graphcore import Digraph, LaminarFamily, build_extension, is_k_arborescence, is_rooted_k_arborescence

MAX_ARB_ARCS = 12
MAX_ARCS = 18


class OracleBoundError(RuntimeError):
    pass


def _check_bounds(D: Digraph, k: int, max_arb_arcs: int, max_arcs: int) -> None:
    size = k * (len(D.nodes) - 1)
    if size > max_arb_arcs:
        raise OracleBoundError(f"k(|V|-1) = {size} exceeds the oracle bound {max_arb_arcs}")
    if len(D.arcs) > max_arcs:
        raise OracleBoundError(f"|A| = {len(D.arcs)} exceeds the oracle bound {max_arcs}")


def _choices_per_node(D: Digraph, degrees: dict[int, int]):
    return [list(combinations(D.in_arcs(v), degrees[v])) for v in sorted(degrees)]


def enumerate_rooted_k_arbs(D: Digraph, s: int, k: int, *, max_arb_arcs: int = MAX_ARB_ARCS,
                            max_arcs: int = MAX_ARCS) -> list[tuple[int, ...]]:
    """All s-rooted k-arborescences as sorted id tuples, in lexicographic order."""
    _check_bounds(D, k, max_arb_arcs, max_arcs)
    degrees = {v: k for v in D.nodes if v != s}
    found = []
    for pick in product(*_choices_per_node(D, degrees)):
        F = tuple(sorted(a for star in pick for a in star))
        if is_rooted_k_arborescence(D, F, s, k):
            found.append(F)
    return sorted(found)


def enumerate_rooted_k_arbs_unpruned(D: Digraph, s: int, k: int) -> list[tuple[int, ...]]:
    """Filter of every arc subset of the right size; the double check for tiny inputs."""
    if len(D.arcs) > 12:
        raise OracleBoundError("unpruned enumeration is limited to 12 arcs")
    size = k * (len(D.nodes) - 1)
    return sorted(F for F in combinations(D.arc_ids, size) if is_rooted_k_arborescence(D, F, s, k))


def _compositions(total: int, parts: int, cap: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap), -1, -1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def enumerate_k_arbs(D: Digraph, k: int, *, max_arb_arcs: int = MAX_ARB_ARCS,
                     max_arcs: int = MAX_ARCS) -> list[tuple[int, ...]]:
    """All k-arborescences (any root vector) as sorted id tuples."""
    _check_bounds(D, k, max_arb_arcs, max_arcs)
    nodes = sorted(D.nodes)
    found = set()
    for q in _compositions(k, len(nodes), k):
        degrees = {v: k - qv for v, qv in zip(nodes, q)}
        for pick in product(*_choices_per_node(D, degrees)):
            F = tuple(sorted(a for star in pick for a in star))
            if is_k_arborescence(D, F, k):
                found.add(F)
    return sorted(found)


def enumerate_k_arbs_unpruned(D: Digraph, k: int) -> list[tuple[int, ...]]:
    if len(D.arcs) > 12:
        raise OracleBoundError("unpruned enumeration is limited to 12 arcs")
    size = k * (len(D.nodes) - 1)
    return sorted(F for F in combinations(D.arc_ids, size) if is_k_arborescence(D, F, k))


def optimal_sets(D: Digraph, family: list[tuple[int, ...]]) -> tuple[Fraction | None, list[tuple[int, ...]]]:
    if not family:
        return None, []
    costs = [D.total_cost(F) for F in family]
    best = min(costs)
    return best, [F for F, c in zip(family, costs) if c == best]


def min_hitting_set(family: list[tuple[int, ...]]) -> tuple[int, tuple[int, ...]]:
    """Smallest set meeting every member; lexicographically first among the smallest."""
    if not family:
        return 0, ()
    universe = sorted({a for F in family for a in F})
    bit = {a: 1 << i for i, a in enumerate(universe)}
    masks = [sum(bit[a] for a in F) for F in family]
    for r in range(1, len(universe) + 1):
        for H in combinations(universe, r):
            h = sum(bit[a] for a in H)
            if all(m & h for m in masks):
                return r, H
    raise AssertionError("the universe itself is a hitting set")  # pragma: no cover


def brute_min_transversal(D: Digraph, k: int, **bounds) -> tuple[int, tuple[int, ...]]:
    _, optima = optimal_sets(D, enumerate_k_arbs(D, k, **bounds))
    return min_hitting_set(optima)


def brute_min_transversal_rooted(D: Digraph, s: int, k: int, **bounds) -> tuple[int, tuple[int, ...]]:
    _, optima = optimal_sets(D, enumerate_rooted_k_arbs(D, s, k, **bounds))
    return min_hitting_set(optima)


def brute_min_transversal_L_tight(D: Digraph, s: int, k: int, L: LaminarFamily, **bounds):
    members = [W for W in L if s not in W]
    tight = [F for F in enumerate_rooted_k_arbs(D, s, k, **bounds)
             if all(D.in_degree(F, W) == k for W in members)]
    return min_hitting_set(tight)


# -- random instances ------------------------------------------------------------------

COST_CHOICES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))


def _plant_arborescence(rng: random.Random, nodes: list[int], root: int) -> list[tuple[int, int]]:
    order = [root] + rng.sample([v for v in nodes if v != root], len(nodes) - 1)
    return [(rng.choice(order[:i]), order[i]) for i in range(1, len(order))]


def random_instance(rng: random.Random, *, n_range=(2, 6), max_arcs: int = 14, ks=(1, 2, 3),
                    costs=COST_CHOICES, root: int | None = None, planted: bool = True,
                    max_arb_arcs: int = MAX_ARB_ARCS) -> tuple[Digraph, int]:
    """A random costed digraph and k with k(|V|-1) <= ``max_arb_arcs`` and |A| <= ``max_arcs``.

    With ``planted`` the arcs of k random spanning arborescences come first (rooted at
    ``root`` when given, else at random nodes) and random arcs fill up the rest.
    """
    while True:
        n = rng.randint(*n_range)
        k = rng.choice(ks)
        if k * (n - 1) <= min(max_arb_arcs, max_arcs):
            break
    nodes = list(range(n))
    pairs: list[tuple[int, int]] = []
    if planted:
        for _ in range(k):
            pairs += _plant_arborescence(rng, nodes, root if root is not None else rng.choice(nodes))
    m = rng.randint(len(pairs), max_arcs) if n > 1 else 0
    while len(pairs) < m:
        u, v = rng.sample(nodes, 2)
        pairs.append((u, v))
    rng.shuffle(pairs)
    return Digraph.from_pairs(nodes, pairs, [rng.choice(costs) for _ in pairs]), k


def random_tight_family(rng: random.Random, D: Digraph, k: int, F, tries: int = 12,
                        avoid: int | None = None) -> LaminarFamily:
    """A random laminar family over the nodes of ``D`` for which ``F`` is tight.

    Members never contain ``avoid`` (pass the root for rooted instances).
    """
    nodes = sorted(D.nodes - {avoid})
    members: list[frozenset] = []
    for _ in range(tries):
        if len(nodes) < 2:
            break
        W = frozenset(rng.sample(nodes, rng.randint(2, len(nodes))))
        if any(W & M and not (W <= M or M <= W) for M in members) or W in members:
            continue
        inside = [a for a in F if D.tail(a) in W and D.head(a) in W]
        if is_k_arborescence(D, inside, k, W):
            members.append(W)
    return LaminarFamily.build(D.nodes, members).normalized()


# -- searching for a family that the f-conditions cannot certify ------------------------


def f_by_definition(D: Digraph, L: LaminarFamily, W, Z) -> int:
    W, Z = frozenset(W), frozenset(Z)
    inner = [M for M in L if M <= W and M & Z]
    count = 0
    for a in D.induced_arcs(W):
        u, v = D.arcs[a]
        if v in Z and u not in Z and not any(u in M and v not in M for M in inner):
            count += 1
    return count


def fig2_conditions(D: Digraph, L: LaminarFamily, k: int) -> tuple[bool, bool]:
    """(every disjoint nonempty pair has f-sum >= k, every compatible subpartition X has
    f-sum >= k(|X| - 1)), both over all members W with at least two nodes."""
    pair_ok = sub_ok = True
    for W in L:
        if len(W) < 2:
            continue
        nodes = sorted(W)
        f = {}
        for r in range(1, len(nodes) + 1):
            for Z in combinations(nodes, r):
                f[frozenset(Z)] = f_by_definition(D, L, W, Z)
        if pair_ok:
            pair_ok = all(f[X] + f[Y] >= k for X, Y in combinations(f, 2) if not X & Y)
        if sub_ok:
            sub_ok = all(sum(f[X] for X in parts) >= k * (len(parts) - 1)
                         for parts in L.compatible_subpartitions(W) if parts)
    return pair_ok, sub_ok


def tight_k_arbs(D: Digraph, L: LaminarFamily, k: int) -> list[tuple[int, ...]]:
    """k-arborescences F with F[W] a k-arborescence of D[W] for every member W."""
    out = []
    for F in enumerate_k_arbs(D, k):
        if all(is_k_arborescence(D, [a for a in F if D.tail(a) in W and D.head(a) in W], k, W)
               for W in L if len(W) > 1):
            out.append(F)
    return out


def random_fig2_candidate(rng: random.Random, n_range=(3, 5)) -> tuple[Digraph, LaminarFamily]:
    n = rng.randint(*n_range)
    pairs = []
    for u in range(n):
        for v in range(n):
            if u != v:
                pairs += [(u, v)] * rng.choice((0, 0, 1, 2))
    nodes = list(range(n))
    members: list[frozenset] = []
    for _ in range(4):
        W = frozenset(rng.sample(nodes, rng.randint(2, n)))
        if all(not W & M or W <= M or M <= W for M in members):
            members.append(W)
    return Digraph.from_pairs(nodes, pairs), LaminarFamily.build(nodes, members).normalized()


def is_fig2_witness(D: Digraph, L: LaminarFamily, k: int) -> bool:
    """Both f-conditions hold and k-arborescences exist, but none of them is L-tight."""
    if k * (len(D.nodes) - 1) > MAX_ARB_ARCS or len(D.arcs) > MAX_ARCS:
        return False
    # cheap matroid-intersection screens first; the verdict itself is by enumeration
    from .arb import exists_L_tight, min_cost_k_arb

    Dp, _ = build_extension(D, k)
    root = next(iter(Dp.nodes - D.nodes))
    if exists_L_tight(Dp, root, k, L) or min_cost_k_arb(D, k) is None:
        return False
    if not all(fig2_conditions(D, L, k)):
        return False
    return bool(enumerate_k_arbs(D, k)) and not tight_k_arbs(D, L, k)


def find_fig2_witness(k: int = 2, seed: int = 0, trials: int = 30_000, n_range=(3, 5)):
    """First random candidate passing :func:`is_fig2_witness`; returns (D, L, trial) or None."""
    rng = random.Random(seed)
    for trial in range(trials):
        D, L = random_fig2_candidate(rng, n_range)
        if is_fig2_witness(D, L, k):
            return D, L, trial
    return None


def fig2_witness_count(k: int, seed: int = 0, trials: int = 30_000, n_range=(3, 5)) -> int:
    rng = random.Random(seed)
    count = 0
    for _ in range(trials):
        D, L = random_fig2_candidate(rng, n_range)
        count += is_fig2_witness(D, L, k)
    return count
