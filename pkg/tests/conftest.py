import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from expandertopo.constructors import lps_graph, named_graph
from expandertopo.graph import build_graph


@pytest.fixture(scope="session")
def lps_29_13():
    return lps_graph(29, 13)


@pytest.fixture
def k3():
    return named_graph("complete", 3)


@pytest.fixture
def petersen():
    return named_graph("petersen")


@st.composite
def graphs(draw, min_n=1, max_n=9, weighted=False, connected=False):
    """Random simple graphs; ``connected`` adds a random spanning path first."""
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = set()
    if connected and n > 1:
        order = draw(st.permutations(range(n)))
        chosen = {tuple(sorted(p)) for p in zip(order, order[1:])}
    if pairs:
        chosen |= set(draw(st.lists(st.sampled_from(pairs), max_size=len(pairs), unique=True)))
    if weighted:
        w = st.floats(0.0, 10.0, allow_nan=False) if not connected else st.floats(0.1, 10.0)
        edges = [(u, v, draw(w)) for u, v in sorted(chosen)]
    else:
        edges = sorted(chosen)
    return build_graph(n, edges)


def configuration_regular(n, d, seed):
    """Small random d-regular graph by stub matching; works for odd d too. None if no simple sample."""
    rng = np.random.default_rng(seed)
    for _ in range(2000):
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        canon = {tuple(sorted(map(int, p))) for p in pairs}
        if len(canon) == len(pairs):
            return build_graph(n, sorted(canon))
    return None


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
