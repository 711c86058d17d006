from __future__ import annotations

import json
import warnings

import numpy as np
import pytest

from walklength.digraph import validate
from walklength.errors import InfeasibleArena
from walklength.experiments.classify import knn_classify, single_linkage
from walklength.experiments.generators import (
    make_cycle_network,
    make_modified_cycle_network,
    make_paper_fixture,
    modified_cycle_digraph,
)
from walklength.experiments.hippocampus import (
    ArenaConfig,
    _in_holes,
    coactivity_counts,
    coactivity_network,
    coactivity_weights,
    place_holes,
    preprocess,
    simulate_trial,
)
from walklength.experiments.pipeline import (
    ExperimentConfig,
    available_combos,
    backend_complex,
    find_trial_dirs,
    load_trial_diagrams,
    run_experiment,
    worker_count,
    write_experiment,
)
from walklength.filtrations import dowker_sink_filtration, walk_length_filtration
from walklength.persistence import compute_persistence

SMALL = ArenaConfig(n_steps=300, n_cells_range=(15, 20), rng_seed=7, n_holes=2)


# -- generators -------------------------------------------------------------------


def test_three_cycle_weights():
    g = make_cycle_network(3)
    assert g.weights[0, 1] == 1 and g.weights[1, 0] == 2
    assert (np.diag(make_cycle_network(7).weights) == 0).all()


@pytest.mark.parametrize("n", range(3, 11))
def test_cycle_family_diagrams(n):
    wl = compute_persistence(walk_length_filtration(make_cycle_network(n), 1), 1).in_dim(1).tolist()
    dk = compute_persistence(dowker_sink_filtration(make_cycle_network(n), 1), 1).in_dim(1).tolist()
    assert wl == dk == [[1.0, float(-(-n // 2))]]
    g = make_modified_cycle_network(n)
    assert g.weights[0, n - 1] == 1
    wl = compute_persistence(walk_length_filtration(g, 1), 1).in_dim(1).tolist()
    dk = compute_persistence(dowker_sink_filtration(g, 1), 1).in_dim(1).tolist()
    assert wl == [[1.0, float(n - 1)]]
    assert dk == ([] if n == 3 else [[1.0, float(-(-(n - 1) // 2))]])


def test_modified_cycle_back_weight_bound():
    with pytest.raises(ValueError):
        modified_cycle_digraph(6, 3)
    with pytest.raises(ValueError):
        make_cycle_network(2)


def test_fixtures():
    Z = make_paper_fixture("fig3_Z").weights
    assert Z[0, 1] == Z[1, 0] == 0.1
    assert Z[1, 2] == 5 and Z[2, 1] == 1 and Z[2, 0] == 1 and Z[0, 2] == 5
    Y = make_paper_fixture("fig4_Y").weights
    assert (Y[0, 1], Y[1, 0], Y[1, 2], Y[2, 1], Y[2, 0], Y[0, 2]) == (1.5, 10.5, 0.1, 0.1, 10.5, 1.5)
    with pytest.raises(KeyError):
        make_paper_fixture("fig9")


# -- simulation ---------------------------------------------------------------------


def test_coactivity_far_apart_cells():
    spikes = np.zeros((3, 40), dtype=np.uint8)
    spikes[0, 0:3] = 1
    spikes[1, 30:33] = 1  # never within 5 steps of cell 0
    spikes[2, 2:6] = 1
    w = coactivity_network(spikes).weights
    assert w[0, 1] == 1 and w[1, 0] == 1
    assert w[0, 2] < 1


def test_coactivity_counts_by_hand():
    spikes = np.array([[1, 0, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0, 1]], dtype=np.uint8)
    N = coactivity_counts(spikes, 5)
    # cell 0 at s=0 precedes cell 1 at t=2 (lag 2); t=6 is lag 6, outside the window
    assert N.tolist() == [[0, 1], [0, 1]]


def test_zero_column_guard_and_normalisation():
    counts = np.array([[2, 0, 1], [1, 0, 0], [1, 0, 3]])
    w = coactivity_weights(counts)
    assert (w[:, 1] == 1).all()
    np.testing.assert_allclose((1 - w[:, [0, 2]]).sum(axis=0), 1.0)


def test_simulated_trial_invariants():
    rec = simulate_trial(SMALL)
    assert set(np.unique(rec.spikes)) <= {0, 1}
    assert not _in_holes(rec.trajectory, rec.holes).any()
    assert (rec.trajectory >= 0).all() and (rec.trajectory <= SMALL.L).all()
    steps = np.abs(np.diff(rec.trajectory, axis=0)).sum(axis=1)
    np.testing.assert_allclose(steps, SMALL.step_fraction * SMALL.L)
    w = rec.network.weights
    off = ~np.eye(len(w), dtype=bool)
    assert (w[off] >= 0).all() and (w[off] <= 1).all()
    assert (np.diag(w) == 0).all()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        validate(rec.network, strict=False)
    assert len(rec.holes) == 2
    assert 15 <= rec.spikes.shape[0] <= 20


def test_simulation_deterministic():
    a, b = simulate_trial(SMALL), simulate_trial(SMALL)
    np.testing.assert_array_equal(a.spikes, b.spikes)
    np.testing.assert_array_equal(a.trajectory, b.trajectory)
    assert a.network == b.network and a.holes == b.holes


@pytest.mark.parametrize("holes", range(5))
def test_holes_disjoint(holes):
    cfg = ArenaConfig(n_holes=holes)
    for seed in range(20):
        hs = place_holes(cfg, np.random.default_rng(seed))
        assert len(hs) == holes
        for i, a in enumerate(hs):
            assert 0 < a[0] and a[2] < cfg.L and 0 < a[1] and a[3] < cfg.L
            for b in hs[i + 1 :]:
                assert a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]


def test_arena_config_validation():
    with pytest.raises(ValueError):
        ArenaConfig(step_fraction=1.5)
    with pytest.raises(ValueError):
        ArenaConfig(n_steps=3)
    with pytest.raises(ValueError):
        ArenaConfig(n_holes=5)
    with pytest.raises(InfeasibleArena):
        place_holes(ArenaConfig(n_holes=1, hole_size_fraction=0.6), np.random.default_rng(0))


def test_preprocess_modes():
    w = np.array([[0, 0.2, 0.5], [1, 0, 1], [1, 1, 0]])
    np.testing.assert_allclose(preprocess(w, "min1").weights, [[0, 0, 0.3], [1, 0, 1], [1, 1, 0]])
    assert preprocess(w, "raw").weights.tolist() == w.tolist()
    purge = preprocess(w, "purge").weights
    assert np.isinf(purge[1, 0]) and purge[0, 2] == 0.5
    mp = preprocess(w, "min_purge").weights
    assert np.isinf(mp[2, 1]) and mp[0, 2] == pytest.approx(0.3)
    ones = np.ones((3, 3)) - np.eye(3)
    assert np.isinf(preprocess(ones, "purge").weights[~np.eye(3, dtype=bool)]).all()
    with pytest.raises(ValueError):
        preprocess(w, "median")


@pytest.mark.parametrize("backend", ["walk_length", "dowker", "dowker_shortest", "rips_min", "rips_max"])
def test_backends_accept_purged_networks(backend):
    net = preprocess(simulate_trial(SMALL).network, "purge")
    fc = backend_complex(net, backend, 1)
    fc.check_monotone()
    compute_persistence(fc, 1)


# -- classification ------------------------------------------------------------------


def test_knn_separated_blocks():
    labels = [0] * 5 + [1] * 5
    dm = np.where(np.equal.outer(labels, labels), 1.0, 10.0)
    np.fill_diagonal(dm, 0)
    acc, conf, pred = knn_classify(dm, labels)
    assert acc == 1.0 and conf.tolist() == [[5, 0], [0, 5]]
    assert knn_classify(np.zeros((6, 6)), [3] * 6)[0] == 1.0
    with pytest.raises(ValueError):
        knn_classify(np.zeros((3, 3)), [0, 1, 2])


def test_knn_tie_goes_to_nearest():
    # item 0 sees two of each label; its single nearest neighbour has label 1
    dm = np.array(
        [
            [0, 1, 2, 3, 4],
            [1, 0, 9, 9, 9],
            [2, 9, 0, 9, 9],
            [3, 9, 9, 0, 9],
            [4, 9, 9, 9, 0],
        ],
        dtype=float,
    )
    _, _, pred = knn_classify(dm, [0, 1, 0, 1, 0])
    assert pred[0] == 1


def test_single_linkage():
    dm = np.array([[0, 1, 5], [1, 0, 5], [5, 5, 0]], dtype=float)
    labels, merges = single_linkage(dm, 2)
    assert labels.tolist() == [0, 0, 1]
    assert merges == [(0, 0, 1, 1.0), (1, 2, 3, 5.0)]
    assert single_linkage(dm, 0.5)[0].tolist() == [0, 1, 2]
    inf = np.array([[0, 1, np.inf], [1, 0, np.inf], [np.inf, np.inf, 0]])
    labels, merges = single_linkage(inf, 1e9)
    assert labels.tolist() == [0, 0, 1] and len(merges) == 1


def test_single_linkage_matches_scipy():
    from scipy.cluster.hierarchy import linkage
    from scipy.spatial.distance import squareform

    rng = np.random.default_rng(3)
    pts = rng.random((9, 2))
    dm = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    _, merges = single_linkage(dm, 0.0)
    ref = linkage(squareform(dm, checks=False), method="single")
    np.testing.assert_allclose([m[3] for m in merges], ref[:, 2])


# -- pipeline -------------------------------------------------------------------------


def tiny_config(**kw):
    base = dict(
        profile="desk",
        seed=11,
        trials_per_arena=2,
        n_steps=150,
        n_cells_range=(8, 10),
        backends=("walk_length", "rips_min"),
        modes=("raw", "purge"),
        knn_k=1,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_round_trip():
    cfg = tiny_config()
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    assert ExperimentConfig.from_dict({"rng_seed": 5}).seed == 5
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        ExperimentConfig(backends=("nope",))
    assert ExperimentConfig(profile="paper").n_cells_range == (150, 200)


def test_trial_seeds_distinct_and_stable():
    cfg = tiny_config()
    seeds = [a.rng_seed for a in cfg.arena_configs()]
    assert len(set(seeds)) == len(seeds) == 10
    assert seeds == [a.rng_seed for a in tiny_config().arena_configs()]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("WALKLENGTH_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("WALKLENGTH_WORKERS")
    assert worker_count(2) == 2


def test_tiny_pipeline_and_artifacts(tmp_path):
    res = run_experiment(tiny_config(), workers=1)
    table = res.accuracy_table()
    assert set(table) == {"walk_length", "rips_min"}
    assert all(0 <= a <= 1 for row in table.values() for a in row.values())
    report = res.report_dict()
    assert {"accuracy", "confusion", "per_trial_predictions"} <= set(report["reports"][0])
    paths = write_experiment(tmp_path, res)
    assert len(paths) == 10
    for p in paths:
        assert (p / "spikes.csv").exists() and (p / "network.csv").exists()
        meta = json.loads((p / "metadata.json").read_text())
        assert {"seed", "label"} <= set(meta)
    dirs = find_trial_dirs([tmp_path])
    assert available_combos(dirs[0]) == sorted(
        [(b, m) for b in ("walk_length", "rips_min") for m in ("raw", "purge")]
    )
    labels, dgms = load_trial_diagrams(dirs, "walk_length", "purge")
    assert labels == res.labels
    # files carry 12 significant digits
    for got, t in zip(dgms, res.trials):
        np.testing.assert_allclose(got.points, t.diagrams[("walk_length", "purge")].points, rtol=1e-11)


def test_pool_matches_serial():
    cfg = tiny_config(backends=("walk_length",), modes=("purge",))
    a = run_experiment(cfg, workers=1)
    b = run_experiment(cfg, workers=2)
    assert [t.diagrams for t in a.trials] == [t.diagrams for t in b.trials]
    np.testing.assert_array_equal(
        a.reports[("walk_length", "purge")].distances, b.reports[("walk_length", "purge")].distances
    )
