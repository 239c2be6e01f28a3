from pathlib import Path

import networkx as nx
import pytest
from hypothesis import settings

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("polnet", deadline=None, max_examples=60)
settings.load_profile("polnet")

# (criterion, passed, detail) rows printed after the run
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def gnp(n, p, seed):
    """Seeded G(n, p) with integer labels."""
    return nx.gnp_random_graph(n, p, seed=seed)


@pytest.fixture
def fixtures():
    return FIXTURES
