import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from commvuln import Partition, parse_edge_list
from oracles import CANONICAL_PARTITION, CANONICAL_TEXT

DATA = Path(__file__).parent / "data"

_criteria: list[str] = []


def record_criterion(line: str) -> None:
    _criteria.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in _criteria:
            terminalreporter.write_line(line)


@pytest.fixture
def canonical():
    return parse_edge_list(CANONICAL_TEXT)


@pytest.fixture
def canonical_partition(canonical):
    return Partition.from_groups(canonical, CANONICAL_PARTITION)


@pytest.fixture
def canonical_path():
    return DATA / "canonical.txt"


def planted_graph(rng: random.Random, communities=None, max_size=6):
    """Random graph with a planted partition.

    Every community is connected internally (random spanning tree plus
    extras) and gets at least one edge to another community.
    """
    k = communities or rng.randint(2, 5)
    groups, edges, nxt = [], [], 0
    for _ in range(k):
        size = rng.randint(2, max_size)
        members = list(range(nxt, nxt + size))
        nxt += size
        groups.append(members)
        for i in range(1, size):
            edges.append((members[i], rng.choice(members[:i])))
        for _ in range(rng.randint(0, size)):
            a, b = rng.sample(members, 2)
            edges.append((a, b))
    for i, grp in enumerate(groups):
        j = rng.choice([x for x in range(k) if x != i])
        edges.append((rng.choice(grp), rng.choice(groups[j])))
    for _ in range(rng.randint(0, k)):
        i, j = rng.sample(range(k), 2)
        edges.append((rng.choice(groups[i]), rng.choice(groups[j])))
    edges = [(a, b) for a, b in edges if a != b]
    from commvuln import Graph

    g = Graph.from_edges(edges)
    return g, Partition.from_groups(g, groups)


@st.composite
def planted(draw, max_size=6):
    seed = draw(st.integers(0, 2**32 - 1))
    return planted_graph(random.Random(seed), max_size=max_size)
