"""Exact example networks: cycle networks and the small counterexamples."""
from __future__ import annotations

from ..digraph import WeightedDigraph, from_edges, shortest_distance_digraph


def cycle_digraph(n: int) -> WeightedDigraph:
    """Directed ``n``-cycle ``x_1 -> x_2 -> ... -> x_n -> x_1`` with unit weights."""
    if n < 3:
        raise ValueError(f"cycle networks need n >= 3, got {n}")
    labels = [f"x{i + 1}" for i in range(n)]
    return from_edges(n, [(i, (i + 1) % n, 1.0) for i in range(n)], labels)


def make_cycle_network(n: int) -> WeightedDigraph:
    """Shortest-distance closure of the unit directed ``n``-cycle: ``w(x_i, x_j) = (j - i) mod n``."""
    return shortest_distance_digraph(cycle_digraph(n))


def modified_cycle_digraph(n: int, back_weight=None) -> WeightedDigraph:
    """The ``n``-cycle with ``x_n -> x_1`` reweighted and an extra unit edge ``x_1 -> x_n``."""
    if n < 3:
        raise ValueError(f"cycle networks need n >= 3, got {n}")
    if back_weight is None:
        back_weight = n - 2
    if back_weight < n - 2:
        raise ValueError(f"back_weight must be at least n - 2 = {n - 2}, got {back_weight}")
    edges = [(i, i + 1, 1.0) for i in range(n - 1)]
    edges += [(n - 1, 0, float(back_weight)), (0, n - 1, 1.0)]
    return from_edges(n, edges, [f"x{i + 1}" for i in range(n)])


def make_modified_cycle_network(n: int, back_weight=None) -> WeightedDigraph:
    return shortest_distance_digraph(modified_cycle_digraph(n, back_weight))


def _fig2(eps: float) -> WeightedDigraph:
    w = 1.0 + eps
    return shortest_distance_digraph(
        from_edges(3, [(0, 1, w), (1, 2, w), (0, 2, w), (2, 0, 10.0)], ["a", "b", "c"])
    )


FIXTURES = {
    "fig1_graph": lambda: from_edges(
        3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (1, 0, 10.0)], ["a", "b", "c"]
    ),
    "fig1_network": lambda: shortest_distance_digraph(FIXTURES["fig1_graph"]()),
    "fig2_X": lambda: _fig2(0.0),
    "fig3_X": lambda: from_edges(2, [(0, 1, 10.0), (1, 0, 1.0)], ["x1", "x2"]),
    "fig3_Y": lambda: from_edges(2, [(0, 1, 5.0), (1, 0, 1.0)], ["y1", "y2"]),
    # vertex order z1, z1', z2
    "fig3_Z": lambda: from_edges(
        3,
        [(0, 1, 0.1), (1, 0, 0.1), (1, 2, 5.0), (2, 1, 1.0), (2, 0, 1.0), (0, 2, 5.0)],
        ["z1", "z1'", "z2"],
    ),
    "fig4_X": lambda: from_edges(
        3,
        [(0, 1, 0.1), (1, 0, 0.1), (1, 2, 1.0), (2, 1, 10.0), (2, 0, 10.0), (0, 2, 1.0)],
        ["a", "b", "c"],
    ),
    "fig4_Y": lambda: from_edges(
        3,
        [(0, 1, 1.5), (1, 0, 10.5), (1, 2, 0.1), (2, 1, 0.1), (2, 0, 10.5), (0, 2, 1.5)],
        ["alpha", "beta", "gamma"],
    ),
}


def make_paper_fixture(name: str, eps: float = 0.0) -> WeightedDigraph:
    """Named example network; ``fig2_Xeps`` takes the perturbation ``eps``."""
    if name == "fig2_Xeps":
        return _fig2(eps)
    try:
        return FIXTURES[name]()
    except KeyError:
        known = ", ".join(sorted(list(FIXTURES) + ["fig2_Xeps"]))
        raise KeyError(f"unknown fixture {name!r}; known: {known}") from None
