from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from walklength.digraph import WeightedDigraph


def random_digraph(rng: np.random.Generator, n: int, density: float = 0.5, integer: bool = False) -> WeightedDigraph:
    """Random digraph that contains a Hamiltonian cycle, so it is strongly connected."""
    if integer:
        w = rng.integers(1, 10, size=(n, n)).astype(float)
    else:
        w = rng.uniform(0.1, 10.0, size=(n, n))
    w[rng.random((n, n)) > density] = np.inf
    perm = rng.permutation(n)
    for i in range(n):
        u, v = perm[i], perm[(i + 1) % n]
        if not np.isfinite(w[u, v]):
            w[u, v] = float(rng.integers(1, 10)) if integer else rng.uniform(0.1, 10.0)
    np.fill_diagonal(w, 0.0)
    return WeightedDigraph(w)


def random_network(rng: np.random.Generator, n: int) -> WeightedDigraph:
    w = rng.uniform(0.1, 10.0, size=(n, n))
    np.fill_diagonal(w, 0.0)
    return WeightedDigraph(w)


@st.composite
def digraphs(draw, min_n: int = 1, max_n: int = 6, connected: bool = False):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    if connected:
        return random_digraph(rng, n, density=draw(st.floats(0.0, 1.0)))
    w = rng.uniform(0.1, 10.0, size=(n, n))
    w[rng.random((n, n)) > draw(st.floats(0.0, 1.0))] = np.inf
    np.fill_diagonal(w, 0.0)
    return WeightedDigraph(w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
