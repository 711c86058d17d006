"""Simulated place-cell activity in square arenas with square holes.

A trial is a random walk on a grid in the free region of the arena, a set of
circular place fields, the binary spike raster they induce, and the directed
coactivity network built from lagged spike coincidences.
"""
from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass, field
from typing import List, Tuple

import numpy as np

from ..digraph import WeightedDigraph
from ..errors import InfeasibleArena

PREPROCESS_MODES = ("raw", "min1", "min_purge", "purge")


@dataclass(frozen=True)
class ArenaConfig:
    L: float = 10.0
    step_fraction: float = 0.05
    n_steps: int = 5000
    n_holes: int = 0
    place_field_radius_fraction: float = 0.05
    n_cells_range: Tuple[int, int] = (150, 200)
    time_window: int = 5
    rng_seed: int = 0
    hole_size_fraction: float = 0.2

    def __post_init__(self):
        for name in ("step_fraction", "place_field_radius_fraction", "hole_size_fraction"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
        if self.n_steps < self.time_window + 1:
            raise ValueError("n_steps must exceed the time window")
        if not 0 <= self.n_holes <= 4:
            raise ValueError("n_holes must be between 0 and 4")
        lo, hi = self.n_cells_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad n_cells_range {self.n_cells_range}")
        object.__setattr__(self, "n_cells_range", (int(lo), int(hi)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_cells_range"] = list(self.n_cells_range)
        return d


@dataclass
class TrialRecord:
    label: int
    spikes: np.ndarray  # (n_cells, n_steps) uint8
    network: WeightedDigraph
    place_field_centers: np.ndarray  # (n_cells, 2)
    trajectory: np.ndarray  # (n_steps, 2) positions
    holes: List[Tuple[float, float, float, float]] = field(default_factory=list)  # x0, y0, x1, y1
    config: ArenaConfig = None


def place_holes(cfg: ArenaConfig, rng: np.random.Generator) -> List[Tuple[float, float, float, float]]:
    """Axis-aligned square holes, at most one per arena quadrant.

    Each hole sits in a distinct quadrant with a margin of one hole side from
    the quadrant edges where that fits, leaving corridors between holes.
    """
    L, side = cfg.L, cfg.hole_size_fraction * cfg.L
    half = L / 2
    quadrants = [(0.0, 0.0), (half, 0.0), (0.0, half), (half, half)]
    chosen = rng.permutation(4)[: cfg.n_holes]
    margin = min(side / 2, (half - side) / 2)
    if margin < 0:
        raise InfeasibleArena(f"holes of side {side} do not fit in quadrants of side {half}")
    holes = []
    for q in sorted(chosen.tolist()):
        qx, qy = quadrants[q]
        x0 = qx + margin + rng.uniform(0, half - side - 2 * margin)
        y0 = qy + margin + rng.uniform(0, half - side - 2 * margin)
        holes.append((x0, y0, x0 + side, y0 + side))
    return holes


def _in_holes(points: np.ndarray, holes) -> np.ndarray:
    inside = np.zeros(len(points), dtype=bool)
    for x0, y0, x1, y1 in holes:
        inside |= (points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1)
    return inside


def free_grid(cfg: ArenaConfig, holes) -> np.ndarray:
    """Boolean ``(g, g)`` mask of grid points outside every (closed) hole."""
    g = int(round(1 / cfg.step_fraction)) + 1
    step = cfg.step_fraction * cfg.L
    ii, jj = np.meshgrid(np.arange(g), np.arange(g), indexing="ij")
    pts = np.stack([ii.ravel() * step, jj.ravel() * step], axis=1)
    return (~_in_holes(pts, holes)).reshape(g, g)


_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _check_connected(free: np.ndarray) -> None:
    cells = np.argwhere(free)
    if not len(cells):
        raise InfeasibleArena("no free grid points")
    seen = np.zeros_like(free)
    start = tuple(cells[0])
    seen[start] = True
    queue = deque([start])
    while queue:
        i, j = queue.popleft()
        for di, dj in _MOVES:
            a, b = i + di, j + dj
            if 0 <= a < free.shape[0] and 0 <= b < free.shape[1] and free[a, b] and not seen[a, b]:
                seen[a, b] = True
                queue.append((a, b))
    if seen.sum() != free.sum():
        raise InfeasibleArena("holes disconnect the free region")


def random_walk(free: np.ndarray, n_steps: int, rng: np.random.Generator) -> np.ndarray:
    """Grid indices of a walk choosing uniformly among allowed axis moves."""
    cells = np.argwhere(free)
    pos = cells[rng.integers(len(cells))]
    i, j = int(pos[0]), int(pos[1])
    g0, g1 = free.shape
    path = np.empty((n_steps, 2), dtype=np.int64)
    for t in range(n_steps):
        path[t] = i, j
        allowed = [
            (i + di, j + dj)
            for di, dj in _MOVES
            if 0 <= i + di < g0 and 0 <= j + dj < g1 and free[i + di, j + dj]
        ]
        i, j = allowed[rng.integers(len(allowed))]
    return path


def place_fields(cfg: ArenaConfig, holes, n_cells: int, rng: np.random.Generator) -> np.ndarray:
    """Field centres uniform over the free region (rejection sampling)."""
    out = np.empty((0, 2))
    while len(out) < n_cells:
        cand = rng.uniform(0, cfg.L, size=(2 * (n_cells - len(out)) + 8, 2))
        cand = cand[~_in_holes(cand, holes)]
        out = np.vstack([out, cand])
    return out[:n_cells]


def spike_raster(trajectory: np.ndarray, centers: np.ndarray, radius: float) -> np.ndarray:
    """``r[i, t] = 1`` iff position ``t`` lies within ``radius`` of centre ``i``."""
    d2 = ((centers[:, None, :] - trajectory[None, :, :]) ** 2).sum(axis=2)
    return (d2 <= radius * radius).astype(np.uint8)


def coactivity_counts(spikes: np.ndarray, window: int = 5) -> np.ndarray:
    """``N[i, j]``: pairs ``(s, t)`` with ``1 <= t - s <= window`` and ``r_i(s) = r_j(t) = 1``."""
    r = spikes.astype(np.int64)
    counts = np.zeros((r.shape[0], r.shape[0]), dtype=np.int64)
    for lag in range(1, window + 1):
        if lag >= r.shape[1]:
            break
        counts += r[:, :-lag] @ r[:, lag:].T
    return counts


def coactivity_weights(counts: np.ndarray) -> np.ndarray:
    """``1 - N[i, j] / sum_i N[i, j]``; a column with zero total is all ones.

    The diagonal is returned as computed; :func:`coactivity_network` zeroes it.
    """
    col = counts.sum(axis=0)
    w = np.ones(counts.shape, dtype=np.float64)
    nz = col > 0
    w[:, nz] = 1.0 - counts[:, nz] / col[nz]
    return w


def coactivity_network(spikes: np.ndarray, window: int = 5) -> WeightedDigraph:
    w = coactivity_weights(coactivity_counts(spikes, window))
    np.fill_diagonal(w, 0.0)
    return WeightedDigraph(w)


def simulate_trial(cfg: ArenaConfig) -> TrialRecord:
    """Run one trial; fully determined by ``cfg.rng_seed``."""
    rng = np.random.default_rng(cfg.rng_seed)
    holes = place_holes(cfg, rng)
    free = free_grid(cfg, holes)
    _check_connected(free)
    step = cfg.step_fraction * cfg.L
    trajectory = random_walk(free, cfg.n_steps, rng) * step
    lo, hi = cfg.n_cells_range
    n_cells = int(rng.integers(lo, hi + 1))
    centers = place_fields(cfg, holes, n_cells, rng)
    spikes = spike_raster(trajectory, centers, cfg.place_field_radius_fraction * cfg.L)
    network = coactivity_network(spikes, cfg.time_window)
    return TrialRecord(cfg.n_holes, spikes, network, centers, trajectory, holes, cfg)


def preprocess(net, mode: str) -> WeightedDigraph:
    """Reweight a coactivity network.

    ``raw`` leaves it unchanged; ``min1`` subtracts the smallest off-diagonal
    weight from entries below 1; ``min_purge`` does the same and turns the
    1-entries into ``inf``; ``purge`` only turns 1-entries into ``inf``.
    """
    w = np.array(net.weights if isinstance(net, WeightedDigraph) else net, dtype=np.float64)
    if mode == "raw":
        return WeightedDigraph(w)
    if mode not in PREPROCESS_MODES:
        raise ValueError(f"unknown preprocessing mode {mode!r}")
    off = ~np.eye(len(w), dtype=bool)
    ones = off & (w == 1.0)
    below = off & (w < 1.0)
    if mode in ("min1", "min_purge") and off.any():
        m = w[off].min()
        w[below] -= m
    if mode in ("min_purge", "purge"):
        w[ones] = np.inf
    return WeightedDigraph(w)
