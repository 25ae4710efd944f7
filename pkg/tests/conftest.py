import numpy as np
import pytest
from hypothesis import strategies as st

from contactnet.graph import ContactGraph


def graph_from_edges(n: int, edges) -> ContactGraph:
    """Graph on vertices "0".."n-1" (ids zero-padded so string order matches index order)."""
    width = len(str(max(n - 1, 0)))
    ids = [str(i).zfill(width) for i in range(n)]
    return ContactGraph.from_pairs([(ids[a], ids[b]) for a, b in edges], ids=ids)


def random_edges(rng: np.random.Generator, n: int, p: float) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


@st.composite
def small_graphs(draw, min_n: int = 1, max_n: int = 9):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return n, [e for e, keep in zip(pairs, mask) if keep]


@pytest.fixture
def two_triangles():
    # triangles {0,1,2} and {3,4,5} joined by the bridge 2-3
    return graph_from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
