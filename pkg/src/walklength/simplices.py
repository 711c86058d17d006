"""Colexicographic enumeration and ranking of vertex subsets.

A ``d``-simplex is a strictly increasing row of ``d + 1`` vertex indices.  The
colex rank of ``c_0 < c_1 < ... < c_d`` is ``sum_i C(c_i, i + 1)``; it does not
depend on the number of vertices, and enumerating all ``(d+1)``-subsets of
``range(n)`` in colex order lists them exactly by rank.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np


@lru_cache(maxsize=None)
def _binom_column(j: int, n: int) -> np.ndarray:
    # C(v, j) for v in range(n); int64 is ample for n <= 200 and j <= 5
    col = np.array([comb(v, j) for v in range(n)], dtype=np.int64)
    col.setflags(write=False)
    return col


def colex_rank(simplices: np.ndarray) -> np.ndarray:
    """Colex rank of each row of a sorted ``(m, d + 1)`` integer array."""
    simplices = np.asarray(simplices, dtype=np.int64)
    if simplices.ndim != 2:
        raise ValueError("expected a 2-d array of simplices")
    m, width = simplices.shape
    ranks = np.zeros(m, dtype=np.int64)
    if m == 0:
        return ranks
    top = int(simplices.max()) + 1
    for i in range(width):
        ranks += _binom_column(i + 1, top)[simplices[:, i]]
    return ranks


def colex_combinations(n: int, size: int) -> np.ndarray:
    """All ``size``-subsets of ``range(n)`` as rows, in colex order."""
    if size == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if size > n:
        return np.zeros((0, size), dtype=np.int64)
    prev = np.arange(n, dtype=np.int64)[:, None]  # size 1
    for r in range(2, size + 1):
        blocks = []
        for top in range(r - 1, n):
            # colex prefix: the first C(top, r-1) rows of prev have max < top
            head = prev[: comb(top, r - 1)]
            blocks.append(np.hstack([head, np.full((len(head), 1), top, dtype=np.int64)]))
        prev = np.vstack(blocks) if blocks else np.zeros((0, r), dtype=np.int64)
    return prev


def faces(simplices: np.ndarray, i: int) -> np.ndarray:
    """Codimension-1 faces obtained by deleting column ``i``."""
    return np.delete(simplices, i, axis=1)
