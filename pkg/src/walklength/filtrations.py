"""Filtered simplicial complexes built from weighted digraphs.

Four constructions share one storage type, :class:`FilteredComplex`:

* walk-length: a simplex enters at the minimal weight of a walk visiting all
  of its vertices;
* Dowker sink / source: a simplex enters once some witness vertex is within
  ``delta`` of (resp. from) every member;
* Rips: a simplex enters at its largest pairwise weight (symmetric input).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .digraph import ATOL, as_digraph
from .errors import NonMonotoneFiltration, NotSymmetric
from .simplices import colex_combinations, colex_rank, faces

# rows per chunk for the witness search; bounds the (rows, d+1, n) temporary
_DOWKER_CHUNK_ELEMS = 4_000_000


@dataclass
class FilteredComplex:
    """Simplices per dimension with their filtration values.

    ``simplices[d]`` is an ``(m_d, d + 1)`` int array of sorted vertex rows in
    colex order and ``values[d]`` the matching float array (``inf`` allowed).
    ``endpoints[d]``, when present, holds the start/end vertex of a minimal
    walk realising each walk-length value.
    """

    simplices: List[np.ndarray]
    values: List[np.ndarray]
    endpoints: Optional[List[np.ndarray]] = None
    n_vertices: Optional[int] = None

    def __post_init__(self):
        if len(self.simplices) != len(self.values):
            raise ValueError("simplices and values must have one entry per dimension")
        simplices, values, endpoints = [], [], []
        for d, (s, v) in enumerate(zip(self.simplices, self.values)):
            s = np.asarray(s, dtype=np.int64).reshape(-1, d + 1)
            v = np.asarray(v, dtype=np.float64).reshape(-1)
            if len(s) != len(v):
                raise ValueError(f"dimension {d}: {len(s)} simplices but {len(v)} values")
            if d > 0 and len(s) and (np.diff(s, axis=1) <= 0).any():
                raise ValueError(f"dimension {d}: vertices must be strictly increasing")
            order = np.argsort(colex_rank(s), kind="stable")
            simplices.append(s[order])
            values.append(v[order])
            if self.endpoints is not None:
                endpoints.append(np.asarray(self.endpoints[d], dtype=np.int64).reshape(-1, 2)[order])
        self.simplices = simplices
        self.values = values
        self.endpoints = endpoints if self.endpoints is not None else None
        if self.n_vertices is None:
            self.n_vertices = len(simplices[0]) if simplices else 0

    @property
    def max_dim(self) -> int:
        return len(self.simplices) - 1

    def __len__(self) -> int:
        return sum(len(s) for s in self.simplices)

    def cells(self) -> Iterator[Tuple[Tuple[int, ...], float]]:
        """Yield ``(vertices, value)`` by dimension, then colex order."""
        for s, v in zip(self.simplices, self.values):
            for row, val in zip(s, v):
                yield tuple(int(x) for x in row), float(val)

    def value_of(self, simplex: Sequence[int]) -> float:
        key = np.array(sorted(simplex), dtype=np.int64)[None, :]
        d = key.shape[1] - 1
        if d > self.max_dim:
            raise KeyError(tuple(simplex))
        ranks = colex_rank(self.simplices[d])
        idx = np.searchsorted(ranks, colex_rank(key)[0])
        if idx >= len(ranks) or ranks[idx] != colex_rank(key)[0]:
            raise KeyError(tuple(simplex))
        return float(self.values[d][idx])

    def as_dict(self) -> dict:
        return {simplex: value for simplex, value in self.cells()}

    def truncate(self, max_dim: int) -> "FilteredComplex":
        ep = self.endpoints[: max_dim + 1] if self.endpoints is not None else None
        return FilteredComplex(self.simplices[: max_dim + 1], self.values[: max_dim + 1], ep, self.n_vertices)

    def check_monotone(self, atol: float = 0.0) -> None:
        """Raise :class:`NonMonotoneFiltration` if a face enters after a coface.

        Also fails when a face of a stored simplex is missing.
        """
        for d in range(1, self.max_dim + 1):
            s = self.simplices[d]
            if not len(s):
                continue
            lower_rank = colex_rank(self.simplices[d - 1])
            for i in range(d + 1):
                fr = colex_rank(faces(s, i))
                idx = np.minimum(np.searchsorted(lower_rank, fr), max(len(lower_rank) - 1, 0))
                if not len(lower_rank) or (lower_rank[idx] != fr).any():
                    raise NonMonotoneFiltration(f"dimension {d}: some face is not in the complex")
                bad = self.values[d - 1][idx] > self.values[d] + atol
                if bad.any():
                    j = int(np.flatnonzero(bad)[0])
                    raise NonMonotoneFiltration(
                        f"face {tuple(faces(s, i)[j])} enters after simplex {tuple(s[j])}"
                    )


def _dims(n: int, k: int) -> range:
    if k < 0:
        raise ValueError("k must be non-negative")
    return range(1, min(k + 1, n - 1) + 1)


def _endpoint_step(A, s_prev, t_prev, f_prev, S):
    """One dimension of the face-extension recursion with stored endpoints.

    Candidates are ordered (face 0 prepend, face 0 append, face 1 prepend, ...)
    and the first minimum wins.
    """
    d = S.shape[1] - 1
    m = len(S)
    cand = np.empty((m, 2 * (d + 1)))
    starts = np.empty((m, 2 * (d + 1)), dtype=np.int64)
    ends = np.empty_like(starts)
    for i in range(d + 1):
        fi = colex_rank(faces(S, i))
        v = S[:, i]
        fs, ft, fv = s_prev[fi], t_prev[fi], f_prev[fi]
        cand[:, 2 * i] = A[v, fs] + fv
        starts[:, 2 * i], ends[:, 2 * i] = v, ft
        cand[:, 2 * i + 1] = fv + A[ft, v]
        starts[:, 2 * i + 1], ends[:, 2 * i + 1] = fs, v
    best = np.argmin(cand, axis=1)
    rows = np.arange(m)
    return cand[rows, best], starts[rows, best], ends[rows, best]


def _exact_step(A, table_prev, S):
    """Minimal walk weight for every (start, end) pair of vertices of each simplex.

    ``table_prev[j, a, c]`` is the cheapest walk through face ``j`` from its
    ``a``-th to its ``c``-th vertex; extending by the final vertex ``b`` gives
    the new table.
    """
    d = S.shape[1] - 1
    m = len(S)
    table = np.full((m, d + 1, d + 1), np.inf)
    for b in range(d + 1):
        fi = colex_rank(faces(S, b))
        sub = table_prev[fi]  # (m, d, d)
        vb = S[:, b]
        for a in range(d + 1):
            if a == b:
                continue
            pa = a if a < b else a - 1
            best = np.full(m, np.inf)
            for c in range(d + 1):
                if c == b:
                    continue
                pc = c if c < b else c - 1
                np.minimum(best, sub[:, pa, pc] + A[S[:, c], vb], out=best)
            table[:, a, b] = best
    return table


def walk_length_filtration(g, k: int, method: str = "auto") -> FilteredComplex:
    """Walk-length filtration up to dimension ``k + 1``.

    ``g`` must already be a shortest-distance digraph (``inf`` entries allowed
    for unreachable pairs).  ``method`` selects the recursion:

    ``"endpoint"``
        extend one stored minimal walk of each face at its start or end.  Exact
        for simplices of dimension <= 2, not beyond.
    ``"exact"``
        keep the minimal walk weight for every ordered (start, end) pair.
    ``"auto"``
        ``"endpoint"`` when ``k + 1 <= 2``, otherwise ``"exact"``.
    """
    g = as_digraph(g)
    if method == "auto":
        method = "endpoint" if k + 1 <= 2 else "exact"
    if method not in ("endpoint", "exact"):
        raise ValueError(f"unknown method {method!r}")
    A = g.weights
    n = g.n
    verts = np.arange(n, dtype=np.int64)
    simplices = [verts[:, None]]
    values = [np.zeros(n)]
    endpoints = [np.stack([verts, verts], axis=1)]
    s_prev, t_prev, f_prev = verts, verts, np.zeros(n)
    table = np.zeros((n, 1, 1))
    for d in _dims(n, k):
        S = colex_combinations(n, d + 1)
        if method == "endpoint":
            f_prev, s_prev, t_prev = _endpoint_step(A, s_prev, t_prev, f_prev, S)
        else:
            table = _exact_step(A, table, S)
            flat = table.reshape(len(S), -1)
            best = np.argmin(flat, axis=1)
            f_prev = flat[np.arange(len(S)), best]
            s_prev = S[np.arange(len(S)), best // (d + 1)]
            t_prev = S[np.arange(len(S)), best % (d + 1)]
        # rounding in the closure can break the triangle inequality by an ulp
        for i in range(d + 1):
            np.maximum(f_prev, values[-1][colex_rank(faces(S, i))], out=f_prev)
        simplices.append(S)
        values.append(f_prev)
        endpoints.append(np.stack([s_prev, t_prev], axis=1))
    return FilteredComplex(simplices, values, endpoints, n)


def walk_length_oracle(g, simplex: Sequence[int]) -> float:
    """Brute force: cheapest ordering of the simplex's vertices.

    Valid on shortest-distance digraphs, where a minimal walk never needs a
    vertex outside the simplex.
    """
    A = as_digraph(g).weights
    verts = list(simplex)
    if len(verts) <= 1:
        return 0.0
    best = np.inf
    for order in permutations(verts):
        total = 0.0
        for u, v in zip(order[:-1], order[1:]):
            total += A[u, v]
        best = min(best, total)
    return float(best)


def _witness_values(W: np.ndarray, S: np.ndarray) -> np.ndarray:
    # W[v, x]: cost for member v to reach witness x
    n = W.shape[1]
    out = np.empty(len(S))
    step = max(1, _DOWKER_CHUNK_ELEMS // max(1, S.shape[1] * n))
    for lo in range(0, len(S), step):
        block = W[S[lo : lo + step]]  # (rows, d+1, n)
        out[lo : lo + step] = block.max(axis=1).min(axis=1)
    return out


def _witness_filtration(W: np.ndarray, k: int) -> FilteredComplex:
    n = W.shape[0]
    simplices = [np.arange(n, dtype=np.int64)[:, None]]
    values = [np.zeros(n)]
    for d in _dims(n, k):
        S = colex_combinations(n, d + 1)
        simplices.append(S)
        values.append(_witness_values(W, S))
    return FilteredComplex(simplices, values, None, n)


def dowker_sink_filtration(g, k: int) -> FilteredComplex:
    """Dowker sink filtration: ``min_x max_{v in simplex} w(v, x)``."""
    return _witness_filtration(as_digraph(g).weights, k)


def dowker_source_filtration(g, k: int) -> FilteredComplex:
    """Dowker source filtration: ``min_x max_{v in simplex} w(x, v)``."""
    return _witness_filtration(as_digraph(g).weights.T, k)


def rips_filtration(g, k: int) -> FilteredComplex:
    g = as_digraph(g)
    if not g.is_symmetric(ATOL):
        raise NotSymmetric("Rips filtration needs a symmetric weight matrix; symmetrize first")
    A = g.weights
    n = g.n
    simplices = [np.arange(n, dtype=np.int64)[:, None]]
    values = [np.zeros(n)]
    for d in _dims(n, k):
        S = colex_combinations(n, d + 1)
        val = np.zeros(len(S))
        for i in range(d + 1):
            for j in range(i + 1, d + 1):
                np.maximum(val, A[S[:, i], S[:, j]], out=val)
        simplices.append(S)
        values.append(val)
    return FilteredComplex(simplices, values, None, n)


FILTRATIONS = {
    "walk-length": walk_length_filtration,
    "dowker-sink": dowker_sink_filtration,
    "dowker-source": dowker_source_filtration,
    "rips": rips_filtration,
}
