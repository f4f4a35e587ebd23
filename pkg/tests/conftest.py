import numpy as np
import pytest

from lasekit.graph import Graph


def erdos_renyi(n, p, seed):
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    hit = rng.random(iu.size) < p
    return Graph.from_edges(n, np.column_stack([iu[hit], ju[hit]]))


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture
def triangle():
    return complete_graph(3)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("C", 1)[1].split()[0])):
            terminalreporter.write_line(line)
