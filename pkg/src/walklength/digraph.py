"""Weighted directed graphs stored as dense weight matrices.

A digraph on ``n`` vertices is an ``n x n`` float array ``w`` where ``w[u, v]``
is the weight of the edge ``u -> v``, ``inf`` marks an absent edge and the
diagonal is zero.  A *network* is the special case with every off-diagonal
entry finite.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    InvalidWalk,
    NegativeWeight,
    NonzeroDiagonal,
    NotStronglyConnected,
    ZeroOffDiagonal,
)

ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightedDigraph:
    """Immutable dense weighted digraph.

    ``labels`` are optional vertex names (used by the CSV readers and the
    fixtures); vertices are always addressed by index.
    """

    weights: np.ndarray
    labels: Optional[tuple] = field(default=None)

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != w.shape[0]:
                raise ValueError("one label per vertex required")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.weights.shape == other.weights.shape and bool(
            np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def transpose(self) -> "WeightedDigraph":
        return WeightedDigraph(self.weights.T, self.labels)

    def is_complete(self) -> bool:
        return bool(np.isfinite(self.weights).all())

    def is_symmetric(self, atol: float = ATOL) -> bool:
        w = self.weights
        both_inf = np.isinf(w) & np.isinf(w.T)
        with np.errstate(invalid="ignore"):
            close = np.abs(w - w.T) <= atol
        return bool((both_inf | close).all())

    def vertex_index(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            return int(v)
        if self.labels is None:
            raise KeyError(v)
        return self.labels.index(str(v))


def as_digraph(g) -> WeightedDigraph:
    """Coerce an array-like to :class:`WeightedDigraph` (no-op for digraphs)."""
    if isinstance(g, WeightedDigraph):
        return g
    return WeightedDigraph(np.asarray(g, dtype=np.float64))


def from_edges(n: int, edges, labels=None) -> WeightedDigraph:
    """Build a digraph from ``(u, v, weight)`` triples; missing pairs are ``inf``."""
    w = np.full((n, n), np.inf)
    np.fill_diagonal(w, 0.0)
    for u, v, wt in edges:
        w[u, v] = wt
    return WeightedDigraph(w, labels)


def validate(g, strict: bool = True) -> WeightedDigraph:
    """Check the digraph invariants and return ``g`` unchanged.

    With ``strict=False`` a zero off-diagonal weight only warns; simulated
    coactivity networks legitimately produce them.
    """
    g = as_digraph(g)
    w = g.weights
    if np.isnan(w).any():
        u, v = np.argwhere(np.isnan(w))[0]
        raise NegativeWeight(f"weight ({u}, {v}) is NaN")
    neg = np.argwhere(w < 0)
    if len(neg):
        u, v = neg[0]
        raise NegativeWeight(f"weight ({u}, {v}) = {w[u, v]} is negative")
    diag = np.flatnonzero(np.diag(w) != 0)
    if len(diag):
        u = diag[0]
        raise NonzeroDiagonal(f"weight ({u}, {u}) = {w[u, u]} must be 0")
    off = w == 0
    np.fill_diagonal(off, False)
    if off.any():
        u, v = np.argwhere(off)[0]
        msg = f"weight ({u}, {v}) is 0 between distinct vertices"
        if strict:
            raise ZeroOffDiagonal(msg)
        warnings.warn(msg, stacklevel=2)
    return g


def walk_weight(g, walk: Sequence[int]) -> float:
    """Total weight of a walk given as a vertex sequence."""
    g = as_digraph(g)
    if len(walk) == 0:
        raise InvalidWalk("walk must contain at least one vertex")
    total = 0.0
    for u, v in zip(walk[:-1], walk[1:]):
        wt = g.weights[u, v]
        if np.isinf(wt):
            raise InvalidWalk(f"no edge {u} -> {v}")
        total += wt
    return total


def _finite_adjacency(w: np.ndarray) -> csr_matrix:
    adj = np.isfinite(w)
    np.fill_diagonal(adj, False)
    return csr_matrix(adj.astype(np.int8))


def is_strongly_connected(g) -> bool:
    g = as_digraph(g)
    if g.n <= 1:
        return True
    ncomp, _ = connected_components(_finite_adjacency(g.weights), directed=True, connection="strong")
    return ncomp == 1


def shortest_distance_digraph(g, allow_infinite: bool = False) -> WeightedDigraph:
    """All-pairs minimal walk weights (Floyd-Warshall).

    Raises :class:`NotStronglyConnected` when some pair is unreachable unless
    ``allow_infinite`` is set, in which case unreachable pairs stay ``inf``.
    """
    g = as_digraph(g)
    d = np.array(g.weights, copy=True)
    for k in range(g.n):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    if not allow_infinite and not np.isfinite(d).all():
        u, v = np.argwhere(~np.isfinite(d))[0]
        raise NotStronglyConnected(f"vertex {v} is unreachable from vertex {u}")
    return WeightedDigraph(d, g.labels)


def symmetrize(g, mode: str = "min") -> WeightedDigraph:
    g = as_digraph(g)
    if mode == "min":
        w = np.minimum(g.weights, g.weights.T)
    elif mode == "max":
        w = np.maximum(g.weights, g.weights.T)
    else:
        raise ValueError(f"unknown symmetrization mode {mode!r}")
    return WeightedDigraph(w, g.labels)
