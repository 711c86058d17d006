"""Persistent homology over the two-element field.

Columns of each boundary matrix are Python integers used as bitsets over the
rows of the dimension below, so a column addition is a single XOR.  Matrices
are reduced from the top dimension down with clearing: a simplex that is the
pivot of a reduced column in dimension ``d + 1`` has a zero column in
dimension ``d`` and is skipped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import NonMonotoneFiltration
from .filtrations import FilteredComplex
from .simplices import colex_rank, faces


class PersistenceDiagram:
    """Multiset of ``(dim, birth, death)`` points; ``death`` may be ``inf``.

    Points are kept sorted by ``(dim, birth, death)`` so equal diagrams have
    equal arrays.
    """

    def __init__(self, points: Iterable[Tuple[int, float, float]] = ()):
        arr = np.array([tuple(p) for p in points], dtype=np.float64).reshape(-1, 3)
        if len(arr):
            if not np.isfinite(arr[:, 1]).all():
                raise ValueError("births must be finite")
            if (arr[:, 2] < arr[:, 1]).any():
                raise ValueError("death precedes birth")
            arr = arr[arr[:, 1] != arr[:, 2]]
            arr = arr[np.lexsort((arr[:, 2], arr[:, 1], arr[:, 0]))]
        arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    def __len__(self) -> int:
        return len(self._points)

    def __iter__(self):
        for dim, b, d in self._points:
            yield int(dim), float(b), float(d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self._points.shape == other._points.shape and bool(np.array_equal(self._points, other._points))

    def __repr__(self) -> str:
        return f"PersistenceDiagram({list(self)})"

    def dims(self) -> List[int]:
        return sorted({int(x) for x in self._points[:, 0]})

    def in_dim(self, dim: int) -> np.ndarray:
        """``(m, 2)`` array of (birth, death) for one homology dimension."""
        return self._points[self._points[:, 0] == dim, 1:].copy()

    def restrict(self, dim: int) -> "PersistenceDiagram":
        return PersistenceDiagram((dim, b, d) for b, d in self.in_dim(dim))

    def betti(self, delta: float, dim: int) -> int:
        """Number of classes alive at ``delta`` (birth <= delta < death)."""
        pts = self.in_dim(dim)
        return int(((pts[:, 0] <= delta) & (delta < pts[:, 1])).sum())


@dataclass
class _Ordered:
    """Finite simplices of one dimension sorted in filtration order."""

    simplices: np.ndarray
    values: np.ndarray
    ranks: np.ndarray  # colex ranks, same order
    rank_sorted: np.ndarray  # ranks ascending
    rank_to_pos: np.ndarray  # position in filtration order for rank_sorted[i]


def _order_dimension(s: np.ndarray, v: np.ndarray) -> _Ordered:
    keep = np.isfinite(v)
    s, v = s[keep], v[keep]
    r = colex_rank(s) if len(s) else np.zeros(0, dtype=np.int64)
    order = np.lexsort((r, v))
    s, v, r = s[order], v[order], r[order]
    by_rank = np.argsort(r, kind="stable")
    return _Ordered(s, v, r, r[by_rank], by_rank)


def _boundary_positions(lower: _Ordered, upper: _Ordered, dim: int) -> np.ndarray:
    """Filtration positions of the faces of each upper simplex, ``(m, dim + 1)``."""
    m = len(upper.simplices)
    pos = np.empty((m, dim + 1), dtype=np.int64)
    if not m:
        return pos
    for i in range(dim + 1):
        fr = colex_rank(faces(upper.simplices, i))
        idx = np.searchsorted(lower.rank_sorted, fr)
        idx_c = np.minimum(idx, max(len(lower.rank_sorted) - 1, 0))
        if not len(lower.rank_sorted) or (lower.rank_sorted[idx_c] != fr).any():
            raise NonMonotoneFiltration(
                f"a face of a finite {dim}-simplex is missing or has infinite value"
            )
        p = lower.rank_to_pos[idx_c]
        if (lower.values[p] > upper.values).any():
            j = int(np.flatnonzero(lower.values[p] > upper.values)[0])
            raise NonMonotoneFiltration(
                f"face {tuple(faces(upper.simplices, i)[j])} enters after {tuple(upper.simplices[j])}"
            )
        pos[:, i] = p
    return pos


def _reduce_dimension(pos: np.ndarray, skip: set) -> dict:
    pivots: dict = {}
    cols: dict = {}
    for j, rows in enumerate(pos.tolist()):
        if j in skip:
            continue
        col = 0
        for r in rows:
            col ^= 1 << r
        while col:
            low = col.bit_length() - 1
            k = pivots.get(low)
            if k is None:
                pivots[low] = j
                cols[j] = col
                break
            col ^= cols[k]
    return pivots


def compute_persistence(fc: FilteredComplex, max_hom_dim: int) -> PersistenceDiagram:
    """Persistence diagram of dimensions ``0..max_hom_dim``.

    Simplices with infinite value are dropped before reduction.  The complex
    must reach dimension ``max_hom_dim + 1`` unless it has no simplices there
    (e.g. too few vertices).
    """
    if max_hom_dim < 0:
        raise ValueError("max_hom_dim must be non-negative")
    top = min(max_hom_dim + 1, fc.max_dim)
    ordered = [_order_dimension(fc.simplices[d], fc.values[d]) for d in range(top + 1)]
    # pivots[d] maps (d-1)-position -> d-position
    pivots: List[Optional[dict]] = [None] * (top + 1)
    for d in range(top, 0, -1):
        pos = _boundary_positions(ordered[d - 1], ordered[d], d)
        skip = set(pivots[d + 1].keys()) if d + 1 <= top and pivots[d + 1] is not None else set()
        pivots[d] = _reduce_dimension(pos, skip)
    points = []
    for d in range(0, min(max_hom_dim, top) + 1):
        vals = ordered[d].values
        killed = pivots[d + 1] if d + 1 <= top else {}
        positive = np.ones(len(vals), dtype=bool)
        if d >= 1:
            positive[list(pivots[d].values())] = False
        for row, j in killed.items():
            b, de = vals[row], ordered[d + 1].values[j]
            if b != de:
                points.append((d, b, de))
        paired = np.zeros(len(vals), dtype=bool)
        paired[list(killed.keys())] = True
        for i in np.flatnonzero(positive & ~paired):
            points.append((d, vals[i], np.inf))
    return PersistenceDiagram(points)


def _gf2_rank(matrix: np.ndarray) -> int:
    """Rank over the two-element field by dense Gaussian elimination."""
    a = (np.asarray(matrix) % 2).astype(np.uint8)
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        hit = np.flatnonzero(a[rank:, c])
        if not len(hit):
            continue
        p = rank + hit[0]
        if p != rank:
            a[[rank, p]] = a[[p, rank]]
        below = np.flatnonzero(a[:, c])
        below = below[below != rank]
        a[below] ^= a[rank]
        rank += 1
    return rank


def _dense_boundary(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    index = {tuple(int(x) for x in row): i for i, row in enumerate(lower)}
    mat = np.zeros((len(lower), len(upper)), dtype=np.uint8)
    for j, row in enumerate(upper):
        verts = tuple(int(x) for x in row)
        for i in range(len(verts)):
            mat[index[verts[:i] + verts[i + 1 :]], j] = 1
    return mat


def betti_oracle(fc: FilteredComplex, delta: float, dim: int) -> int:
    """Betti number of the sublevel complex at ``delta`` from full boundary ranks."""
    def level(d):
        if d < 0 or d > fc.max_dim:
            return np.zeros((0, max(d + 1, 1)), dtype=np.int64)
        return fc.simplices[d][fc.values[d] <= delta]

    cells, lower, upper = level(dim), level(dim - 1), level(dim + 1)
    rank_here = _gf2_rank(_dense_boundary(lower, cells)) if dim > 0 and len(cells) and len(lower) else 0
    rank_up = _gf2_rank(_dense_boundary(cells, upper)) if len(upper) and len(cells) else 0
    return len(cells) - rank_here - rank_up
