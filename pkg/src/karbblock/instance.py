"""Plain-text instances.

One record per line::

    n 4
    k 2
    root 0
    a 0 1 3/2
    L 1 2
    expect {"minTransversalSize": 1}

Nodes are ``0..n-1``; arcs get ids in order of appearance. Costs are ``p/q`` or
integers and may be left out entirely (then every arc is uncosted). ``#`` starts
a comment line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .graphcore import Digraph, GraphError, LaminarFamily

_INT = re.compile(r"^\d+$")
_COST = re.compile(r"^(\d+)(?:/(\d+))?$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class Instance:
    digraph: Digraph
    k: int | None = None
    root: int | None = None
    members: list[frozenset] = field(default_factory=list)
    expect: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.digraph.nodes)

    def laminar(self) -> LaminarFamily:
        return LaminarFamily.build(self.digraph.nodes, self.members)


def _int(tok: str, lineno: int, what: str) -> int:
    if not _INT.match(tok):
        raise ParseError(f"{what} must be a nonnegative integer, got {tok!r}", lineno)
    return int(tok)


def parse_instance(text: str) -> Instance:
    n = k = root = None
    arcs: list[tuple[int, int, int, int]] = []
    costs: list[Fraction | None] = []
    members: list[tuple[frozenset, int]] = []
    expect: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tag, _, rest = line.partition(" ")
        toks = rest.split()
        if tag == "n":
            if n is not None or len(toks) != 1:
                raise ParseError("expected a single 'n <count>' record", lineno)
            n = _int(toks[0], lineno, "node count")
        elif tag == "k":
            if k is not None or len(toks) != 1:
                raise ParseError("expected a single 'k <int>' record", lineno)
            k = _int(toks[0], lineno, "k")
            if k < 1:
                raise ParseError("k must be positive", lineno)
        elif tag == "root":
            if root is not None or len(toks) != 1:
                raise ParseError("expected a single 'root <node>' record", lineno)
            root = _int(toks[0], lineno, "root")
        elif tag == "a":
            if len(toks) not in (2, 3):
                raise ParseError("arc records are 'a <tail> <head> [p/q]'", lineno)
            u = _int(toks[0], lineno, "tail")
            v = _int(toks[1], lineno, "head")
            if u == v:
                raise ParseError(f"self-loop at node {u}", lineno)
            cost = None
            if len(toks) == 3:
                m = _COST.match(toks[2])
                if not m or (m.group(2) is not None and int(m.group(2)) == 0):
                    raise ParseError(f"bad cost {toks[2]!r}; expected p/q with q > 0", lineno)
                cost = Fraction(int(m.group(1)), int(m.group(2) or 1))
            arcs.append((len(arcs), u, v, lineno))
            costs.append(cost)
        elif tag == "L":
            if not toks:
                raise ParseError("empty laminar member", lineno)
            members.append((frozenset(_int(t, lineno, "node") for t in toks), lineno))
        elif tag == "expect":
            try:
                payload = json.loads(rest)
            except json.JSONDecodeError as exc:
                raise ParseError(f"expect payload is not JSON: {exc.msg}", lineno) from None
            if not isinstance(payload, dict):
                raise ParseError("expect payload must be a JSON object", lineno)
            expect.update(payload)
        else:
            raise ParseError(f"unknown record {tag!r}", lineno)
    if n is None:
        raise ParseError("missing 'n <count>' record")
    if n < 1:
        raise ParseError("the node count must be positive")
    for a, u, v, lineno in arcs:
        if u >= n or v >= n:
            raise ParseError(f"arc endpoint outside 0..{n - 1}", lineno)
    for M, lineno in members:
        if max(M) >= n:
            raise ParseError(f"laminar member node outside 0..{n - 1}", lineno)
    if root is not None and root >= n:
        raise ParseError(f"root outside 0..{n - 1}")
    given = [c is not None for c in costs]
    if any(given) and not all(given):
        raise ParseError("either every arc carries a cost or none does")
    cost_map = {a: c for (a, *_), c in zip(arcs, costs)} if all(given) and arcs else None
    D = Digraph.build(range(n), [(a, u, v) for a, u, v, _ in arcs], cost_map)
    try:
        LaminarFamily.build(D.nodes, [M for M, _ in members])
    except GraphError as exc:
        raise ParseError(str(exc)) from None
    return Instance(D, k, root, [M for M, _ in members], expect)


def read_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def fixture_path(name: str) -> Path:
    """Path of a bundled instance, e.g. ``fixture_path("bridge.txt")``."""
    return Path(str(resources.files("karbblock") / "fixtures" / name))


def load_fixture(name: str) -> Instance:
    return read_instance(fixture_path(name))


def format_cost(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def format_instance(inst: Instance, comment: str | None = None) -> str:
    D = inst.digraph
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append(f"n {len(D.nodes)}")
    if inst.k is not None:
        lines.append(f"k {inst.k}")
    if inst.root is not None:
        lines.append(f"root {inst.root}")
    for a in D.arc_ids:
        u, v = D.arcs[a]
        tail = f" {format_cost(D.costs[a])}" if D.costs is not None else ""
        lines.append(f"a {u} {v}{tail}")
    for M in inst.members:
        lines.append("L " + " ".join(str(v) for v in sorted(M)))
    if inst.expect:
        lines.append("expect " + json.dumps(inst.expect, sort_keys=True))
    return "\n".join(lines) + "\n"
