from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walklength.digraph import WeightedDigraph, is_strongly_connected, shortest_distance_digraph, symmetrize
from walklength.errors import NonMonotoneFiltration, NotSymmetric
from walklength.experiments.generators import make_cycle_network, make_modified_cycle_network, make_paper_fixture
from walklength.filtrations import (
    FilteredComplex,
    dowker_sink_filtration,
    dowker_source_filtration,
    rips_filtration,
    walk_length_filtration,
    walk_length_oracle,
)
from walklength.simplices import colex_combinations, colex_rank, faces

from conftest import digraphs, random_digraph

BUILDERS = [walk_length_filtration, dowker_sink_filtration, dowker_source_filtration]


def walk_enumeration_oracle(w: np.ndarray, simplex, max_len: int) -> float:
    """Cheapest walk on the raw digraph that visits every vertex of ``simplex``.

    Dynamic programme over (walk length, visited subset, current vertex); walks
    may pass through vertices outside the simplex.
    """
    n = len(w)
    pos = {v: i for i, v in enumerate(simplex)}
    full = (1 << len(simplex)) - 1
    bit = [1 << pos[v] if v in pos else 0 for v in range(n)]
    cost = {}
    for v in simplex:
        cost[(bit[v], v)] = 0.0
    best = cost.get((full, simplex[0]), np.inf) if len(simplex) == 1 else np.inf
    for _ in range(max_len):
        nxt = dict(cost)
        for (mask, u), c in cost.items():
            for v in range(n):
                if v == u or not np.isfinite(w[u, v]):
                    continue
                key = (mask | bit[v], v)
                if c + w[u, v] < nxt.get(key, np.inf):
                    nxt[key] = c + w[u, v]
        cost = nxt
    for (mask, _), c in cost.items():
        if mask == full:
            best = min(best, c)
    return best


# -- simplices -------------------------------------------------------------------


@pytest.mark.parametrize("n,size", [(1, 1), (5, 1), (5, 2), (6, 3), (7, 4), (4, 4), (3, 4)])
def test_colex_enumeration_matches_sorted_oracle(n, size):
    expected = sorted(combinations(range(n), size), key=lambda c: tuple(reversed(c)))
    got = [tuple(r) for r in colex_combinations(n, size)]
    assert got == expected
    if got:
        np.testing.assert_array_equal(colex_rank(np.array(got)), np.arange(len(got)))


def test_faces_drop_one_vertex():
    S = np.array([[0, 2, 5]])
    assert faces(S, 0).tolist() == [[2, 5]]
    assert faces(S, 2).tolist() == [[0, 2]]


# -- walk-length ------------------------------------------------------------------


def test_fig1_walk_length_values():
    fc = walk_length_filtration(make_paper_fixture("fig1_network"), 1)
    d = fc.as_dict()
    assert d[(0, 1)] == 1 and d[(1, 2)] == 1 and d[(0, 2)] == 1
    assert d[(0, 1, 2)] == 2
    assert walk_length_oracle(make_paper_fixture("fig1_network"), [0, 1, 2]) == 2


def test_single_vertex():
    for k in (0, 1, 3):
        for builder in BUILDERS:
            fc = builder(WeightedDigraph([[0.0]]), k)
            assert list(fc.cells()) == [((0,), 0.0)]


def test_cycle_six_values():
    g = make_cycle_network(6)
    fc = walk_length_filtration(g, 1)
    assert (fc.values[1] == 1).sum() == 6
    assert fc.value_of([0, 2, 4]) == 4
    for s, v in zip(fc.simplices[2], fc.values[2]):
        assert v == walk_length_oracle(g, s)


def test_modified_cycle_late_simplex():
    g = make_modified_cycle_network(6)
    assert walk_length_filtration(g, 1).value_of([0, 4, 5]) == 5
    assert walk_length_oracle(g, [0, 4, 5]) == 5


def test_endpoint_recursion_inexact_in_dimension_three():
    # frozen instance found by random search against the permutation oracle
    w = np.array([[0, 9, 8, 5], [7, 0, 7, 1], [5, 6, 0, 4], [6, 8, 6, 0]], dtype=float)
    g = WeightedDigraph(w)
    assert walk_length_oracle(g, [0, 1, 2, 3]) == 12  # order 1, 3, 2, 0
    assert walk_length_filtration(g, 2, method="endpoint").value_of([0, 1, 2, 3]) == 13
    assert walk_length_filtration(g, 2, method="exact").value_of([0, 1, 2, 3]) == 12
    assert walk_length_filtration(g, 2).value_of([0, 1, 2, 3]) == 12


def test_unknown_method():
    with pytest.raises(ValueError):
        walk_length_filtration(make_cycle_network(3), 1, method="greedy")


@pytest.mark.parametrize("seed", range(25))
def test_oracle_equivalence_dim_three(seed):
    # integer weights keep every walk sum exact, so equality is exact too
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    g = shortest_distance_digraph(random_digraph(rng, n, density=0.4, integer=True))
    fc = walk_length_filtration(g, 2)
    for s, v in fc.cells():
        assert v == walk_length_oracle(g, s)


@pytest.mark.parametrize("seed", range(10))
def test_oracle_equivalence_float_weights(seed):
    rng = np.random.default_rng(1000 + seed)
    g = shortest_distance_digraph(random_digraph(rng, 6, density=0.4))
    fc = walk_length_filtration(g, 2)
    for s, v in fc.cells():
        assert v == pytest.approx(walk_length_oracle(g, s), abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_endpoint_and_exact_agree_through_dimension_two(seed):
    rng = np.random.default_rng(100 + seed)
    g = shortest_distance_digraph(random_digraph(rng, 7, density=0.5, integer=True))
    a = walk_length_filtration(g, 1, method="endpoint")
    b = walk_length_filtration(g, 1, method="exact")
    for d in range(3):
        np.testing.assert_array_equal(a.values[d], b.values[d])


def test_endpoints_realise_value():
    g = make_paper_fixture("fig4_X")
    fc = walk_length_filtration(g, 1)
    for d in range(1, 3):
        for s, (start, end) in zip(fc.simplices[d], fc.endpoints[d]):
            assert start in s and end in s


@settings(max_examples=30, deadline=None)
@given(digraphs(min_n=2, max_n=5))
def test_closure_invariance_against_raw_walks(g):
    sd = shortest_distance_digraph(g, allow_infinite=True)
    fc = walk_length_filtration(sd, 2)
    n = g.n
    for s, v in fc.cells():
        oracle = walk_enumeration_oracle(g.weights, list(s), n * len(s))
        if np.isinf(oracle):
            assert np.isinf(v)
        else:
            assert v == pytest.approx(oracle, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(digraphs(min_n=1, max_n=6))
def test_complete_complex_and_connectivity(g):
    sd = shortest_distance_digraph(g, allow_infinite=True)
    fc = walk_length_filtration(sd, 1)
    finite = all(np.isfinite(v).all() for v in fc.values)
    if is_strongly_connected(g):
        assert finite
    # a walk through every vertex exists iff each pair is reachable one way
    d = sd.weights
    assert finite == bool((np.isfinite(d) | np.isfinite(d.T)).all())


def test_complete_complex_without_strong_connectivity():
    g = WeightedDigraph([[0.0, 1.0], [np.inf, 0.0]])
    assert not is_strongly_connected(g)
    fc = walk_length_filtration(shortest_distance_digraph(g, allow_infinite=True), 0)
    assert fc.value_of([0, 1]) == 1


@settings(max_examples=40, deadline=None)
@given(digraphs(min_n=1, max_n=6), st.integers(0, 2))
def test_monotone_all_builders(g, k):
    sd = shortest_distance_digraph(g, allow_infinite=True)
    for builder in BUILDERS:
        builder(sd, k).check_monotone()
    rips_filtration(symmetrize(g, "max"), k).check_monotone()


def test_check_monotone_detects_violation():
    fc = FilteredComplex([np.array([[0], [1]]), np.array([[0, 1]])], [np.array([0.0, 2.0]), np.array([1.0])])
    with pytest.raises(NonMonotoneFiltration):
        fc.check_monotone()
    missing = FilteredComplex([np.array([[0]]), np.array([[0, 1]])], [np.array([0.0]), np.array([1.0])])
    with pytest.raises(NonMonotoneFiltration):
        missing.check_monotone()


def test_dimension_capped_by_vertex_count():
    fc = walk_length_filtration(make_cycle_network(3), 5)
    assert fc.max_dim == 2


# -- Dowker and Rips ----------------------------------------------------------------


def test_dowker_cycle_six_triangle():
    g = make_cycle_network(6)
    # witness x1 gives max(0, 2, 1) = 2; no witness does better
    assert dowker_sink_filtration(g, 1).value_of([0, 4, 5]) == 2
    witnesses = [max(g.weights[v, x] for v in (0, 4, 5)) for x in range(6)]
    assert min(witnesses) == 2


def test_dowker_modified_cycle_triangle():
    assert dowker_sink_filtration(make_modified_cycle_network(6), 1).value_of([0, 4, 5]) == 1


def test_dowker_source_is_sink_of_transpose():
    g = make_paper_fixture("fig1_network")
    a = dowker_source_filtration(g, 1)
    b = dowker_sink_filtration(g.transpose(), 1)
    assert a.as_dict() == b.as_dict()
    sym = symmetrize(g, "max")
    assert dowker_source_filtration(sym, 1).as_dict() == dowker_sink_filtration(sym, 1).as_dict()


def test_dowker_infinite_without_witness():
    w = np.full((3, 3), np.inf)
    np.fill_diagonal(w, 0)
    fc = dowker_sink_filtration(WeightedDigraph(w), 1)
    assert np.isinf(fc.values[1]).all()
    assert (fc.values[0] == 0).all()


@pytest.mark.parametrize("n", range(3, 11))
def test_cycle_dowker_equals_walk_length(n):
    g = make_cycle_network(n)
    a = walk_length_filtration(g, 1)
    b = dowker_sink_filtration(g, 1)
    for d in range(a.max_dim + 1):
        np.testing.assert_array_equal(a.values[d], b.values[d])


def test_rips_examples():
    g = symmetrize(make_paper_fixture("fig1_network"), "min")
    assert rips_filtration(g, 1).value_of([0, 1, 2]) == 1
    two = WeightedDigraph([[0.0, 5.0], [5.0, 0.0]])
    assert rips_filtration(two, 0).value_of([0, 1]) == 5
    with pytest.raises(NotSymmetric):
        rips_filtration(make_paper_fixture("fig1_network"), 1)


def test_complex_helpers():
    fc = walk_length_filtration(make_cycle_network(4), 1)
    assert len(fc) == 4 + 6 + 4
    assert fc.truncate(1).max_dim == 1
    with pytest.raises(KeyError):
        fc.value_of([0, 1, 2, 3])
    with pytest.raises(ValueError):
        FilteredComplex([np.array([[0], [1]]), np.array([[1, 0]])], [np.zeros(2), np.ones(1)])
