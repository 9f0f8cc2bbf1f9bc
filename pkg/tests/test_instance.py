from fractions import Fraction

import pytest

from karbblock.instance import Instance, ParseError, format_instance, load_fixture, parse_instance

TEXT = """\
# a tiny instance
n 3
k 2
root 0
a 0 1 3/2
a 0 2 1
a 1 2 0
L 1 2
expect {"size": 1}
"""


def test_parse_records():
    inst = parse_instance(TEXT)
    assert inst.n == 3 and inst.k == 2 and inst.root == 0
    assert inst.digraph.arcs == {0: (0, 1), 1: (0, 2), 2: (1, 2)}
    assert inst.digraph.cost(0) == Fraction(3, 2)
    assert inst.members == [frozenset({1, 2})]
    assert inst.expect == {"size": 1}


def test_round_trip():
    inst = parse_instance(TEXT)
    again = parse_instance(format_instance(inst, comment="copy"))
    assert again.digraph.arcs == inst.digraph.arcs
    assert again.digraph.costs == inst.digraph.costs
    assert again.members == inst.members and again.expect == inst.expect


def test_uncosted_instance():
    inst = parse_instance("n 2\na 0 1\na 0 1\n")
    assert inst.digraph.costs is None and inst.k is None


@pytest.mark.parametrize("text, line", [
    ("n 2\na 0 0\n", 2),
    ("n 2\na 0 5\n", 2),
    ("n 2\nk 0\n", 2),
    ("n 2\na 0 1 1/0\n", 2),
    ("n 2\nfoo\n", 2),
    ("n 2\nexpect [1]\n", 2),
    ("n 2\nn 3\n", 2),
])
def test_errors_point_at_lines(text, line):
    with pytest.raises(ParseError) as err:
        parse_instance(text)
    assert err.value.line == line


@pytest.mark.parametrize("text", [
    "a 0 1\n",
    "n 2\na 0 1 1\na 1 0\n",
    "n 3\nL 0 1\nL 1 2\n",
    "n 2\nroot 4\n",
])
def test_errors_without_line(text):
    with pytest.raises(ParseError):
        parse_instance(text)


def test_fixtures_load():
    for name in ("bridge.txt", "mandatory_arc.txt", "fig2_witness.txt"):
        inst = load_fixture(name)
        assert isinstance(inst, Instance) and inst.expect
