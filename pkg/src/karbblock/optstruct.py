"""Optimality certificate (L, A0, A1) for minimum-cost rooted k-arborescences.

The covering LP ``min cx, 0 <= x <= 1, x(delta_in(Z)) >= k`` is solved through its
dual with an exact rational primal simplex; violated cuts enter as new dual
columns. Parallel arcs of equal cost share one LP variable bounded by their
multiplicity, which keeps the tableaus small on extended digraphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .arb import min_cost_rooted_k_arb
from .graphcore import Digraph, GraphError, LaminarFamily, as_fraction, max_flow


class InfeasibleError(GraphError):
    pass


class DualityGapError(AssertionError):
    pass


@dataclass(frozen=True)
class DualSolution:
    y: Mapping[frozenset, Fraction]
    z: Mapping[int, Fraction]
    objective: Fraction


@dataclass(frozen=True)
class LPSolution:
    x: Mapping[int, Fraction]
    objective: Fraction
    cuts: tuple[frozenset, ...]
    dual: DualSolution
    pivots: int


@dataclass(frozen=True)
class OptimalityStructure:
    L: LaminarFamily
    A0: frozenset
    A1: frozenset
    opt_cost: Fraction
    x: Mapping[int, Fraction] = field(default_factory=dict)
    dual: DualSolution | None = None

    def to_json(self) -> dict:
        return {
            "x": {str(a): frac_str(v) for a, v in sorted(self.x.items())},
            "y": [{"set": sorted(Z), "value": frac_str(v)} for Z, v in _sorted_sets(self.dual.y.items())],
            "z": {str(a): frac_str(v) for a, v in sorted(self.dual.z.items()) if v},
            "L": [sorted(W) for W in self.L],
            "A0": sorted(self.A0),
            "A1": sorted(self.A1),
            "optCost": frac_str(self.opt_cost),
        }


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _sorted_sets(items):
    return sorted(items, key=lambda kv: (len(kv[0]), sorted(kv[0])))


# -- exact simplex over the dual with column generation -------------------------------


class _DualTableau:
    """``max sum_j obj_j w_j`` s.t. ``A w <= c``, ``w >= 0``, with ``c >= 0``.

    Starts from the slack basis and accepts new columns at any point: the
    current basis stays primal feasible, so pivoting simply resumes.
    """

    def __init__(self, rhs: list[Fraction]):
        self.m = len(rhs)
        self.rows = [[Fraction(int(i == j)) for j in range(self.m)] for i in range(self.m)]
        self.rhs = list(rhs)
        self.red = [Fraction(0)] * self.m
        self.obj = [Fraction(0)] * self.m
        self.basis = list(range(self.m))
        self.pivots = 0

    def add_column(self, col: list, obj) -> int:
        # the slack columns of the tableau hold B^-1
        entries = [sum((r[i] * col[i] for i in range(self.m) if col[i]), Fraction(0)) for r in self.rows]
        red = sum((self.red[i] * col[i] for i in range(self.m) if col[i]), Fraction(0)) - obj
        for r, e in zip(self.rows, entries):
            r.append(e)
        self.red.append(red)
        self.obj.append(Fraction(obj))
        return len(self.red) - 1

    def solve(self) -> None:
        while True:
            j = next((j for j, r in enumerate(self.red) if r < 0), None)
            if j is None:
                return
            best = None
            for i, row in enumerate(self.rows):
                if row[j] > 0:
                    key = (self.rhs[i] / row[j], self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise InfeasibleError("covering LP is infeasible (dual unbounded)")
            self._pivot(best[1], j)

    def _pivot(self, i: int, j: int) -> None:
        row = self.rows[i]
        p = row[j]
        row[:] = [v / p for v in row]
        self.rhs[i] /= p
        for t, other in enumerate(self.rows):
            f = other[j]
            if t != i and f:
                other[:] = [a - f * b for a, b in zip(other, row)]
                self.rhs[t] -= f * self.rhs[i]
        f = self.red[j]
        if f:
            self.red = [a - f * b for a, b in zip(self.red, row)]
        self.basis[i] = j
        self.pivots += 1

    def values(self) -> list[Fraction]:
        w = [Fraction(0)] * len(self.red)
        for i, b in enumerate(self.basis):
            w[b] = self.rhs[i]
        return w

    def row_duals(self) -> list[Fraction]:
        return self.red[: self.m]


def _groups(D: Digraph, costs: Mapping[int, Fraction], s: int):
    groups: dict[tuple, list[int]] = {}
    for a in D.arc_ids:
        u, v = D.arcs[a]
        if v != s:
            groups.setdefault((u, v, costs[a]), []).append(a)
    return list(groups.items())


def _enters(u, v, Z) -> bool:
    return v in Z and u not in Z


def solve_primal_lp(D: Digraph, s: int, k: int, costs: Mapping | None = None) -> LPSolution:
    """Optimal x of the covering LP by cutting planes; arcs entering ``s`` get x = 0."""
    costs = _resolve_costs(D, costs)
    groups = _groups(D, costs, s)
    tab = _DualTableau([key[2] for key, _ in groups])
    cuts: list[frozenset] = []
    cut_col: dict[frozenset, int] = {}

    def add_cut(Z: frozenset) -> None:
        col = [1 if _enters(key[0], key[1], Z) else 0 for key, _ in groups]
        cut_col[Z] = tab.add_column(col, k)
        cuts.append(Z)

    z_col = []
    for g, (key, arcs) in enumerate(groups):
        z_col.append(tab.add_column([-1 if h == g else 0 for h in range(len(groups))], -len(arcs)))
    for v in sorted(D.nodes - {s}):
        add_cut(frozenset([v]))
    while True:
        tab.solve()
        xg = tab.row_duals()
        flow_arcs = [(key[0], key[1], xg[g]) for g, (key, _) in enumerate(groups)]
        fresh = []
        for v in sorted(D.nodes - {s}):
            value, side = max_flow(flow_arcs, s, v)
            if value < k and side not in cut_col and side not in fresh:
                fresh.append(side)
        if not fresh:
            break
        for Z in fresh:
            add_cut(Z)

    w = tab.values()
    x = {a: Fraction(0) for a in D.arc_ids}
    z = {a: Fraction(0) for a in D.arc_ids}
    for g, (key, arcs) in enumerate(groups):
        for a in arcs:
            x[a] = xg[g] / len(arcs)
            z[a] = w[z_col[g]]
    y = {Z: w[cut_col[Z]] for Z in cuts if w[cut_col[Z]]}
    primal = sum((costs[a] * x[a] for a in D.arc_ids), Fraction(0))
    dual = DualSolution(y, z, k * sum(y.values(), Fraction(0)) - sum(z.values(), Fraction(0)))
    if primal != dual.objective:
        raise DualityGapError(f"primal {primal} != dual {dual.objective}")
    return LPSolution(x, primal, tuple(cuts), dual, tab.pivots)


def _resolve_costs(D: Digraph, costs) -> dict[int, Fraction]:
    if costs is None:
        costs = D.costs if D.costs is not None else {a: 0 for a in D.arcs}
    out = {a: as_fraction(costs[a]) for a in D.arcs}
    if any(c < 0 for c in out.values()):
        raise GraphError("costs must be nonnegative")
    return out


def extract_dual(lp: LPSolution) -> DualSolution:
    return lp.dual


def dual_slack(D: Digraph, costs: Mapping, dual: DualSolution, a: int) -> Fraction:
    u, v = D.arcs[a]
    load = sum((y for Z, y in dual.y.items() if _enters(u, v, Z)), Fraction(0))
    return costs[a] - load + dual.z.get(a, Fraction(0))


def check_dual(D: Digraph, costs: Mapping, dual: DualSolution, k: int, s: int) -> None:
    """Raise unless ``dual`` is feasible with the stated objective."""
    for Z, val in dual.y.items():
        if val < 0 or s in Z or not Z:
            raise DualityGapError(f"bad dual entry on {sorted(Z)}")
    for a in D.arc_ids:
        if D.head(a) == s:
            continue
        if dual.z.get(a, 0) < 0 or dual_slack(D, costs, dual, a) < 0:
            raise DualityGapError(f"dual constraint of arc {a} is violated")
    obj = k * sum(dual.y.values(), Fraction(0)) - sum(dual.z.values(), Fraction(0))
    if obj != dual.objective:
        raise DualityGapError("dual objective does not match its variables")


def _crossing(X: frozenset, Y: frozenset) -> bool:
    return bool(X & Y) and not X <= Y and not Y <= X


def uncross(dual: DualSolution, max_steps: int = 100_000) -> DualSolution:
    """Make the y-support laminar by moving mass from crossing pairs to their meet and join."""
    y = {Z: v for Z, v in dual.y.items() if v}
    for _ in range(max_steps):
        support = sorted(y, key=lambda Z: (len(Z), sorted(Z)))
        pair = next(((X, Y) for X, Y in combinations(support, 2) if _crossing(X, Y)), None)
        if pair is None:
            return DualSolution(y, dict(dual.z), dual.objective)
        X, Y = pair
        eps = min(y[X], y[Y])
        for Z, d in ((X, -eps), (Y, -eps), (X & Y, eps), (X | Y, eps)):
            y[Z] = y.get(Z, Fraction(0)) + d
            if not y[Z]:
                del y[Z]
    raise RuntimeError("uncrossing did not terminate within the step limit")


def optimality_structure(D: Digraph, s: int, k: int, costs: Mapping | None = None) -> OptimalityStructure:
    """Laminar family L and arc sets A0 (never optimal) and A1 (always optimal).

    Arcs entering ``s`` are put into A0. L lives on the node set of ``D`` and
    contains it together with all singletons.
    """
    costs = _resolve_costs(D, costs)
    if min_cost_rooted_k_arb(D, s, k, costs) is None:
        raise InfeasibleError(f"no {k}-arborescence rooted at {s}")
    lp = solve_primal_lp(D, s, k, costs)
    dual = uncross(lp.dual)
    check_dual(D, costs, dual, k, s)
    if dual.objective != lp.objective:
        raise DualityGapError("uncrossing changed the objective")
    A0 = frozenset(a for a in D.arc_ids if D.head(a) == s or dual_slack(D, costs, dual, a) > 0)
    A1 = frozenset(a for a in D.arc_ids if dual.z.get(a, 0) > 0)
    if A0 & A1:
        raise DualityGapError("an arc is both forbidden and mandatory")
    L = LaminarFamily.build(D.nodes, dual.y.keys()).normalized()
    return OptimalityStructure(L, A0, A1, lp.objective, lp.x, dual)


def dump_json(structure: OptimalityStructure) -> str:
    return json.dumps(structure.to_json(), sort_keys=True, indent=2)
