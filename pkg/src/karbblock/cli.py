"""Command line front end.

    karbblock solve inst.txt [--rooted --root 0 | --l-tight] [--dump-dual]
    karbblock verify inst.txt --arcs 3,5
    karbblock oracle inst.txt
    karbblock selftest --count 50 --seed 1

Reports are JSON with sorted keys; rationals are "p/q" strings. Exit code 2
marks unreadable input, 3 an exhaustive-search bound.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .arb import min_cost_k_arb, min_cost_rooted_k_arb
from .blocking import (
    DEFAULT_MAX_PAIR_SET,
    ExhaustiveBoundError,
    is_transversal,
    minimum_transversal,
    minimum_transversal_L_tight,
    minimum_transversal_rooted,
)
from .graphcore import Digraph, GraphError
from .instance import ParseError, read_instance
from .oracle import (
    OracleBoundError,
    brute_min_transversal,
    brute_min_transversal_L_tight,
    brute_min_transversal_rooted,
    enumerate_k_arbs,
    enumerate_rooted_k_arbs,
    min_hitting_set,
    optimal_sets,
    random_instance,
)
from .optstruct import frac_str
from .tightmat import RecursionBoundError, exchange_property, root_vectors_of_optima

EXIT_PARSE = 2
EXIT_BOUND = 3

PROBLEMS = {"plain": "blocking-opt-karb", "rooted": "blocking-opt-rooted-karb", "tight": "blocking-L-tight"}


class UsageError(ValueError):
    pass


def _mode(args) -> str:
    if args.l_tight and args.rooted:
        raise UsageError("--rooted and --l-tight are exclusive")
    return "tight" if args.l_tight else "rooted" if args.rooted else "plain"


def _setup(args):
    inst = read_instance(args.instance)
    k = args.k if args.k is not None else inst.k
    if k is None or k < 1:
        raise UsageError("k is missing: add a 'k' record or pass --k")
    mode = _mode(args)
    root = args.root if args.root is not None else inst.root
    if mode != "plain":
        if root is None:
            raise UsageError("this problem needs a root: add a 'root' record or pass --root")
        if root not in inst.digraph.nodes:
            raise UsageError(f"root {root} is not a node")
    D = inst.digraph
    if D.costs is None:
        D = D.with_costs({a: 0 for a in D.arcs})
    return inst, D, k, mode, root


def _arc_echo(D: Digraph, arcs) -> list[dict]:
    return [{"id": a, "tail": D.tail(a), "head": D.head(a), "cost": frac_str(D.cost(a))} for a in sorted(arcs)]


def cmd_solve(args) -> dict:
    inst, D, k, mode, root = _setup(args)
    t0 = time.perf_counter()
    if mode == "tight":
        res = minimum_transversal_L_tight(D.without_in_arcs(root), root, k, inst.laminar(),
                                          max_pair_set=args.max_pair_set, jobs=args.jobs)
    elif mode == "rooted":
        res = minimum_transversal_rooted(D, root, k, max_pair_set=args.max_pair_set, jobs=args.jobs)
    else:
        res = minimum_transversal(D, k, max_pair_set=args.max_pair_set, jobs=args.jobs)
    elapsed = time.perf_counter() - t0
    report = {
        "problem": PROBLEMS[mode],
        "k": k,
        "optCost": None if res.opt_cost is None else frac_str(res.opt_cost),
        "transversal": _arc_echo(D, res.arcs),
        "size": res.size,
        "provenance": res.provenance,
        "witness": None,
    }
    if res.witness is not None:
        w = res.witness
        report["witness"] = {"W": list(w.W), "Z1": list(w.Z1), "Z2": list(w.Z2), "value": w.value}
        if mode == "plain":
            # W may contain the added root; name it so readers can tell it apart
            report["witness"]["extensionRoot"] = D.next_node_id()
    if args.dump_dual:
        report["laminarDual"] = None if res.structure is None else res.structure.to_json()
    if args.timings:
        report["timings"] = {"solveSeconds": round(elapsed, 6)}
    return report


def _blocks(D: Digraph, k: int, mode: str, root, inst, H) -> bool:
    if mode == "tight":
        return is_transversal(D.without_in_arcs(root), root, k, inst.laminar(), H)
    if mode == "rooted":
        best = min_cost_rooted_k_arb(D, root, k)
        if best is None:
            return True
        rest = min_cost_rooted_k_arb(D.delete_arcs(H), root, k)
        return rest is None or rest.cost > best.cost
    best = min_cost_k_arb(D, k)
    if best is None:
        return True
    rest = min_cost_k_arb(D.delete_arcs(H), k)
    return rest is None or rest.cost > best.cost


def _brute(D: Digraph, k: int, mode: str, root, inst):
    if mode == "tight":
        return brute_min_transversal_L_tight(D.without_in_arcs(root), root, k, inst.laminar().normalized())
    if mode == "rooted":
        return brute_min_transversal_rooted(D, root, k)
    return brute_min_transversal(D, k)


def cmd_verify(args) -> dict:
    inst, D, k, mode, root = _setup(args)
    H = sorted({int(t) for t in args.arcs.split(",") if t.strip()}) if args.arcs else []
    missing = [a for a in H if a not in D.arcs]
    if missing:
        raise UsageError(f"unknown arc ids {missing}")
    ok = _blocks(D, k, mode, root, inst, H)
    report = {"problem": PROBLEMS[mode], "candidate": H, "isTransversal": ok, "isMinimum": None, "details": {}}
    try:
        size, witness = _brute(D, k, mode, root, inst)
    except OracleBoundError as exc:
        report["details"]["oracle"] = f"skipped: {exc}"
        return report
    report["isMinimum"] = ok and len(H) == size
    report["details"] = {"oracleMinimum": size, "oracleWitness": list(witness)}
    return report


def cmd_oracle(args) -> dict:
    inst, D, k, mode, root = _setup(args)
    if mode == "tight":
        Dr = D.without_in_arcs(root)
        members = [W for W in inst.laminar().normalized() if root not in W]
        family = [F for F in enumerate_rooted_k_arbs(Dr, root, k)
                  if all(Dr.in_degree(F, W) == k for W in members)]
        best, optima = None, family
    elif mode == "rooted":
        best, optima = optimal_sets(D, enumerate_rooted_k_arbs(D, root, k))
    else:
        best, optima = optimal_sets(D, enumerate_k_arbs(D, k))
    size, witness = min_hitting_set(optima)
    nodes = sorted(D.nodes)
    if mode == "plain":
        vectors = root_vectors_of_optima(D, k)
    else:
        vectors = {tuple(k if v == root else 0 for v in nodes)} if optima else set()
    return {
        "problem": PROBLEMS[mode],
        "numOptima": len(optima),
        "optCost": None if best is None else frac_str(best),
        "minTransversalSize": size,
        "witness": list(witness),
        "rootVectors": [{"node": dict(zip(map(str, nodes), q)), "sum": sum(q)} for q in sorted(vectors)],
        "exchangeOk": exchange_property(vectors),
    }


def cmd_selftest(args) -> dict:
    """Pipeline against the oracle on seeded random instances, both problem variants."""
    rng = random.Random(args.seed)
    failures = []
    for i in range(args.count):
        rooted = i % 2 == 1
        D, k = random_instance(rng, root=0 if rooted else None)
        if rooted:
            got = minimum_transversal_rooted(D, 0, k, jobs=args.jobs).size
            want = brute_min_transversal_rooted(D, 0, k)[0]
        else:
            got = minimum_transversal(D, k, jobs=args.jobs).size
            want = brute_min_transversal(D, k)[0]
        if got != want:
            failures.append({"index": i, "rooted": rooted, "k": k, "pipeline": got, "oracle": want})
    return {"instances": args.count, "seed": args.seed, "agree": args.count - len(failures), "failures": failures}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="karbblock", description="Block every minimum-cost k-arborescence.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("instance", help="instance file")
        p.add_argument("--rooted", action="store_true", help="rooted variant (needs a root)")
        p.add_argument("--root", type=int, default=None)
        p.add_argument("--l-tight", action="store_true", help="block L-tight rooted k-arborescences")
        p.add_argument("--k", type=int, default=None, help="override the k record")

    def runtime(p):
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--json-out", default=None, help="also write the report here")

    p = sub.add_parser("solve", help="minimum transversal via the full pipeline")
    common(p)
    runtime(p)
    p.add_argument("--max-pair-set", type=int, default=DEFAULT_MAX_PAIR_SET)
    p.add_argument("--dump-dual", action="store_true", help="include x, y, z, L, A0, A1")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte stability)")
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry; the solver is deterministic")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a candidate arc set")
    common(p)
    runtime(p)
    p.add_argument("--arcs", default="", help="comma separated arc ids")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force report")
    common(p)
    runtime(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest", help="pipeline vs oracle on random instances")
    runtime(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=40)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (ParseError, UsageError, GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ExhaustiveBoundError, OracleBoundError, RecursionBoundError) as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
    if args.command == "selftest" and report["failures"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
