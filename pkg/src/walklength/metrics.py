"""Distances between persistence diagrams and between networks.

Network distances are exact minimisations over finite search spaces
(correspondences, map pairs, bijections), so they are only usable on small
networks; each kind enforces a search-space limit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .digraph import as_digraph
from .errors import EmptyRelation, SearchSpaceTooLarge, SizeMismatch
from .persistence import PersistenceDiagram

MAX_CORRESPONDENCE_CELLS = 16
MAX_BIJECTION_SIZE = 8
MAX_MAP_PAIRS = 10**7


# -- bottleneck ---------------------------------------------------------------


def _split(diagram, dim: Optional[int]) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(diagram, PersistenceDiagram):
        if dim is None:
            raise ValueError("dim is required for PersistenceDiagram inputs")
        pts = diagram.in_dim(dim)
    else:
        pts = np.asarray(diagram, dtype=np.float64).reshape(-1, 2)
    pts = pts[pts[:, 0] != pts[:, 1]]
    inf = np.isinf(pts[:, 1])
    return pts[~inf], np.sort(pts[inf, 0])


def _covers(adj: np.ndarray, row_mult: np.ndarray, col_mult: np.ndarray) -> bool:
    """Can every row copy be matched, with row ``i`` and column ``j`` used
    ``row_mult[i]`` and ``col_mult[j]`` times, along edges of ``adj``?

    Solved as a max flow source -> rows -> columns -> sink.
    """
    need = int(row_mult.sum())
    if need == 0:
        return True
    r, c = adj.shape
    ii, jj = np.nonzero(adj)
    src, sink = 0, r + c + 1
    heads = np.concatenate([np.zeros(r, np.int64), 1 + ii, 1 + r + np.arange(c)])
    tails = np.concatenate([1 + np.arange(r), 1 + r + jj, np.full(c, sink)])
    caps = np.concatenate([row_mult, np.full(len(ii), need), col_mult]).astype(np.int32)
    graph = csr_matrix((caps, (heads, tails)), shape=(r + c + 2, r + c + 2))
    return maximum_flow(graph, src, sink).flow_value == need


def _matchable_within(cost, half_p, mult_p, half_q, mult_q, t: float) -> bool:
    """Is there a matching of cost <= t once points may also go to the diagonal?

    Points whose half-persistence exceeds ``t`` must be matched off the
    diagonal.  By the Mendelsohn-Dulmage theorem one matching covers both
    forced sets iff each forced set can be covered on its own.
    """
    adj = cost <= t
    fp, fq = half_p > t, half_q > t
    return _covers(adj[fp], mult_p[fp], mult_q) and _covers(adj[:, fq].T, mult_q[fq], mult_p)


def bottleneck_distance(d1, d2, dim: Optional[int] = None) -> float:
    """Exact bottleneck distance between the ``dim`` parts of two diagrams.

    Accepts :class:`PersistenceDiagram` (with ``dim``) or ``(m, 2)`` arrays of
    (birth, death).  Points at infinity are matched among themselves; the result
    is ``inf`` when their counts differ.
    """
    p, p_inf = _split(d1, dim)
    q, q_inf = _split(d2, dim)
    if len(p_inf) != len(q_inf):
        return float("inf")
    # optimal bottleneck matching on a line pairs sorted births
    inf_part = float(np.abs(p_inf - q_inf).max()) if len(p_inf) else 0.0
    if not len(p) and not len(q):
        return inf_part
    # repeated points become multiplicities
    p, mult_p = np.unique(p, axis=0, return_counts=True)
    q, mult_q = np.unique(q, axis=0, return_counts=True)
    cost = np.maximum(np.abs(p[:, None, 0] - q[None, :, 0]), np.abs(p[:, None, 1] - q[None, :, 1]))
    half_p, half_q = (p[:, 1] - p[:, 0]) / 2, (q[:, 1] - q[:, 0]) / 2
    candidates = np.unique(np.concatenate([cost.ravel(), half_p, half_q]))
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _matchable_within(cost, half_p, mult_p, half_q, mult_q, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return max(inf_part, float(candidates[lo]))


def distance_matrix(diagrams: Sequence[PersistenceDiagram], dim: int) -> np.ndarray:
    """Symmetric matrix of pairwise bottleneck distances."""
    m = len(diagrams)
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = bottleneck_distance(diagrams[i], diagrams[j], dim)
    return out


# -- relations and maps ---------------------------------------------------------


def _pair_costs(X, Y, pairs: Sequence[Tuple[int, int]]) -> np.ndarray:
    A, B = as_digraph(X).weights, as_digraph(Y).weights
    if not len(pairs):
        raise EmptyRelation("relation must be nonempty")
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    return np.abs(A[np.ix_(xs, xs)] - B[np.ix_(ys, ys)])


def is_correspondence(pairs, nx: int, ny: int) -> bool:
    return {x for x, _ in pairs} == set(range(nx)) and {y for _, y in pairs} == set(range(ny))


def is_bijection(pairs, nx: int, ny: int) -> bool:
    xs = [x for x, _ in pairs]
    ys = [y for _, y in pairs]
    return nx == ny == len(pairs) and len(set(xs)) == nx and len(set(ys)) == ny


def dis_inf(R, X, Y) -> float:
    """Max weight discrepancy over ordered pairs of relation elements."""
    return float(_pair_costs(X, Y, list(R)).max())


def dis_1(R, X, Y) -> float:
    """Sum of weight discrepancies over ordered pairs of relation elements."""
    return float(_pair_costs(X, Y, list(R)).sum())


def _map_dis(A, B, phi) -> np.ndarray:
    phi = np.asarray(phi)
    return np.abs(A - B[np.ix_(phi, phi)])


def _map_codis(A, B, phi, psi) -> np.ndarray:
    # entry (x, y): |A(x, psi(y)) - B(phi(x), y)|
    phi, psi = np.asarray(phi), np.asarray(psi)
    return np.abs(A[:, psi] - B[phi, :])


def map_distortions(X, Y, phi, psi, norm: str = "l1") -> Dict[str, float]:
    """``dis(phi)``, ``dis(psi)``, ``codis(phi, psi)``, ``codis(psi, phi)``.

    ``norm="l1"`` sums the discrepancies, ``norm="inf"`` takes their maximum.
    """
    A, B = as_digraph(X).weights, as_digraph(Y).weights
    if len(phi) != len(A) or len(psi) != len(B):
        raise ValueError("phi must be defined on every vertex of X and psi on every vertex of Y")
    agg = np.sum if norm == "l1" else np.max
    return {
        "dis_phi": float(agg(_map_dis(A, B, phi))),
        "dis_psi": float(agg(_map_dis(B, A, psi))),
        "codis_phi_psi": float(agg(_map_codis(A, B, phi, psi))),
        "codis_psi_phi": float(agg(_map_codis(B, A, psi, phi))),
    }


def codis_inf(phi, psi, X, Y) -> float:
    return map_distortions(X, Y, phi, psi, "inf")["codis_phi_psi"]


def codis_1(phi, psi, X, Y) -> float:
    return map_distortions(X, Y, phi, psi, "l1")["codis_phi_psi"]


# -- exhaustive network distances ---------------------------------------------


@dataclass
class NetworkDistanceResult:
    kind: str
    value: float
    raw_objective: float
    argmin_pairs: List[List[Tuple[int, int]]] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "value": self.value,
                "raw_objective": self.raw_objective,
                "argmin_pairs": [[list(p) for p in group] for group in self.argmin_pairs],
            }
        )


def _correspondence_masks(nx: int, ny: int) -> np.ndarray:
    cells = nx * ny
    codes = np.arange(1, 2**cells, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(cells)) & 1).astype(bool)
    grid = bits.reshape(-1, nx, ny)
    ok = grid.any(axis=2).all(axis=1) & grid.any(axis=1).all(axis=1)
    return bits[ok]


def _search_correspondences(A, B, objective: str):
    nx, ny = len(A), len(B)
    if nx * ny > MAX_CORRESPONDENCE_CELLS:
        raise SearchSpaceTooLarge(
            f"|X||Y| = {nx * ny} exceeds {MAX_CORRESPONDENCE_CELLS} for exhaustive correspondence search"
        )
    cells = [(x, y) for x in range(nx) for y in range(ny)]
    xs = np.array([c[0] for c in cells])
    ys = np.array([c[1] for c in cells])
    cost = np.abs(A[np.ix_(xs, xs)] - B[np.ix_(ys, ys)])
    masks = _correspondence_masks(nx, ny)
    best_val, best_idx = np.inf, -1
    chunk = max(1, 2_000_000 // (len(cells) ** 2))
    for lo in range(0, len(masks), chunk):
        m = masks[lo : lo + chunk]
        if objective == "l1":
            mf = m.astype(np.float64)
            vals = np.einsum("ri,ij,rj->r", mf, cost, mf)
        else:
            both = m[:, :, None] & m[:, None, :]
            vals = np.where(both, cost[None], 0.0).max(axis=(1, 2))
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_idx = float(vals[i]), lo + i
    best = masks[best_idx]
    pairs = [cells[i] for i in np.flatnonzero(best)]
    return best_val, [pairs]


def _all_maps(n_from: int, n_to: int) -> np.ndarray:
    return np.array(list(product(range(n_to), repeat=n_from)), dtype=np.int64).reshape(-1, n_from)


def _search_maps(A, B):
    nx, ny = len(A), len(B)
    if ny**nx * nx**ny > MAX_MAP_PAIRS:
        raise SearchSpaceTooLarge(f"{ny ** nx * nx ** ny} map pairs exceed {MAX_MAP_PAIRS}")
    phis = _all_maps(nx, ny)  # (P, nx)
    psis = _all_maps(ny, nx)  # (Q, ny)
    dis_phi = np.abs(A[None] - B[phis[:, :, None], phis[:, None, :]]).sum(axis=(1, 2))
    dis_psi = np.abs(B[None] - A[psis[:, :, None], psis[:, None, :]]).sum(axis=(1, 2))
    # codis(phi, psi) = sum_x T[x, phi(x), psi] with T[x, a, psi] = sum_y |A(x, psi(y)) - B(a, y)|
    T = np.abs(A[:, psis].transpose(1, 0, 2)[:, :, None, :] - B[None, None, :, :]).sum(axis=3)
    T = T.transpose(1, 2, 0)  # (nx, ny, Q)
    # codis(psi, phi) = sum_y U[y, psi(y), phi] with U[y, b, phi] = sum_x |B(y, phi(x)) - A(b, x)|
    U = np.abs(B[:, phis].transpose(1, 0, 2)[:, :, None, :] - A[None, None, :, :]).sum(axis=3)
    U = U.transpose(1, 2, 0)  # (ny, nx, P)
    best_val, best_pair = np.inf, (None, None)
    chunk = max(1, 4_000_000 // max(1, len(psis)))
    for lo in range(0, len(phis), chunk):
        ph = phis[lo : lo + chunk]
        codis_pq = sum(T[x, ph[:, x], :] for x in range(nx))  # (p, Q)
        codis_qp = sum(U[y][:, lo : lo + len(ph)][psis[:, y]] for y in range(ny)).T  # (p, Q)
        obj = np.maximum(np.maximum(codis_pq, codis_qp), dis_phi[lo : lo + len(ph), None])
        obj = np.maximum(obj, dis_psi[None, :])
        flat = int(np.argmin(obj))
        i, j = divmod(flat, obj.shape[1])
        if obj[i, j] < best_val:
            best_val, best_pair = float(obj[i, j]), (ph[i], psis[j])
    phi, psi = best_pair
    return best_val, [[(x, int(phi[x])) for x in range(nx)], [(y, int(psi[y])) for y in range(ny)]]


def _search_bijections(A, B):
    n = len(A)
    if len(B) != n:
        raise SizeMismatch(f"bijections need equal sizes, got {len(A)} and {len(B)}")
    if n > MAX_BIJECTION_SIZE:
        raise SearchSpaceTooLarge(f"n = {n} exceeds {MAX_BIJECTION_SIZE} for bijection search")
    perms = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    vals = np.abs(A[None] - B[perms[:, :, None], perms[:, None, :]]).sum(axis=(1, 2))
    i = int(np.argmin(vals))
    return float(vals[i]), [[(x, int(perms[i, x])) for x in range(n)]]


KINDS = ("inf", "l1", "l1_map", "l1_bij")


def search_network_distance(X, Y, kind: str = "l1") -> NetworkDistanceResult:
    """Exact minimiser of the distortion objective for ``kind``.

    ``raw_objective`` is the minimised distortion; ``value`` is half of it.
    ``argmin_pairs`` holds the minimising relation (one group) or the two maps
    ``phi``, ``psi`` (two groups, ``l1_map``).
    """
    A, B = as_digraph(X).weights, as_digraph(Y).weights
    if kind == "inf":
        raw, arg = _search_correspondences(A, B, "inf")
    elif kind == "l1":
        raw, arg = _search_correspondences(A, B, "l1")
    elif kind == "l1_map":
        raw, arg = _search_maps(A, B)
    elif kind == "l1_bij":
        # for mutually inverse bijections all four map terms equal dis1 of the matching
        raw, arg = _search_bijections(A, B)
    else:
        raise ValueError(f"unknown network distance kind {kind!r}; expected one of {KINDS}")
    return NetworkDistanceResult(kind, raw / 2, raw, arg)


def network_distance(X, Y, kind: str = "l1") -> float:
    return search_network_distance(X, Y, kind).value
