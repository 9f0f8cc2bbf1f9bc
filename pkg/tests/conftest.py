import random

import pytest

from karbblock.oracle import random_instance

SUITE_SEED = 20240611

_REPORT = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_REPORT] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for the terminal summary (and print it for -s runs)."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config.stash[_REPORT].append(line)

    return record


def make_suite(count: int, seed: int, rooted: bool, planted_every: int = 4):
    """Seeded random instances; every ``planted_every``-th one is unplanted so infeasible cases show up."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        D, k = random_instance(rng, root=0 if rooted else None, planted=(i % planted_every != 0))
        out.append((D, k))
    return out


@pytest.fixture(scope="session")
def suite():
    return make_suite(300, SUITE_SEED, rooted=False)


@pytest.fixture(scope="session")
def rooted_suite():
    return make_suite(300, SUITE_SEED + 1, rooted=True)
