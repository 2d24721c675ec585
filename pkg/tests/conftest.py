import pytest

from cumapf.core import Instance
from cumapf.graph import Graph


def worked_graph() -> Graph:
    return Graph.grid(5, 3)


def v(graph: Graph, name: str) -> int:
    """``"v2-3"`` -> id of row 2, column 3 (1-based labels)."""
    r, c = name[1:].split("-")
    return graph.vertex_at(int(r) - 1, int(c) - 1)


WORKED_FROM = ["v1-2", "v2-1", "v2-2", "v2-3", "v3-2", "v4-1", "v4-2"]
WORKED_TO = ["v2-2", "v3-1", "v3-2", "v3-3", "v4-2", "v4-1", "v4-3"]
WORKED_T = ["v3-2", "v4-1", "v4-2", "v4-3", "v5-1", "v5-2", "v5-3"]


@pytest.fixture
def worked():
    g = worked_graph()
    starts = tuple(v(g, s) for s in WORKED_FROM)
    targets = tuple(v(g, s) for s in WORKED_T)
    return g, starts, targets, tuple(v(g, s) for s in WORKED_TO)


@pytest.fixture
def worked_instance(worked):
    g, starts, targets, _ = worked
    return Instance(g, starts, targets)


# one line per acceptance criterion, shown after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
