"""Arena classification experiment: simulate, preprocess, persist, compare, classify."""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .. import io as wio
from ..digraph import shortest_distance_digraph, symmetrize
from ..filtrations import dowker_sink_filtration, rips_filtration, walk_length_filtration
from ..metrics import distance_matrix
from ..persistence import PersistenceDiagram, compute_persistence
from .classify import knn_classify
from .hippocampus import PREPROCESS_MODES, ArenaConfig, TrialRecord, preprocess, simulate_trial

BACKENDS = ("walk_length", "dowker", "dowker_shortest", "rips_min", "rips_max")
WORKERS_ENV = "WALKLENGTH_WORKERS"
N_ARENAS = 5

PROFILES = {
    "desk": {"trials_per_arena": 5, "n_steps": 2000, "n_cells_range": (40, 60)},
    "paper": {"trials_per_arena": 20, "n_steps": 5000, "n_cells_range": (150, 200)},
}


@dataclass
class ExperimentConfig:
    profile: str = "desk"
    seed: int = 0
    modes: Tuple[str, ...] = PREPROCESS_MODES
    backends: Tuple[str, ...] = BACKENDS
    hom_dim: int = 1
    trials_per_arena: Optional[int] = None
    n_steps: Optional[int] = None
    n_cells_range: Optional[Tuple[int, int]] = None
    L: float = 10.0
    step_fraction: float = 0.05
    place_field_radius_fraction: float = 0.05
    time_window: int = 5
    hole_size_fraction: float = 0.2
    knn_k: int = 4

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        for key, val in PROFILES[self.profile].items():
            if getattr(self, key) is None:
                setattr(self, key, val)
        self.n_cells_range = tuple(int(x) for x in self.n_cells_range)
        self.modes = tuple(self.modes)
        self.backends = tuple(self.backends)
        bad = [m for m in self.modes if m not in PREPROCESS_MODES]
        bad += [b for b in self.backends if b not in BACKENDS]
        if bad:
            raise ValueError(f"unknown modes/backends: {bad}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "rng_seed" in data and "seed" not in data:
            data["seed"] = data.pop("rng_seed")
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["modes"], d["backends"] = list(self.modes), list(self.backends)
        d["n_cells_range"] = list(self.n_cells_range)
        return d

    def trial_seed(self, n_holes: int, index: int) -> int:
        """Per-trial seed from the root seed and the (arena, trial) counter."""
        ss = np.random.SeedSequence([self.seed, n_holes, index])
        return int(ss.generate_state(1, np.uint64)[0])

    def arena_configs(self) -> List[ArenaConfig]:
        out = []
        for holes in range(N_ARENAS):
            for idx in range(self.trials_per_arena):
                out.append(
                    ArenaConfig(
                        L=self.L,
                        step_fraction=self.step_fraction,
                        n_steps=self.n_steps,
                        n_holes=holes,
                        place_field_radius_fraction=self.place_field_radius_fraction,
                        n_cells_range=self.n_cells_range,
                        time_window=self.time_window,
                        rng_seed=self.trial_seed(holes, idx),
                        hole_size_fraction=self.hole_size_fraction,
                    )
                )
        return out


def backend_complex(net, backend: str, hom_dim: int):
    """Filtered complex of a (preprocessed) network for one backend."""
    k = hom_dim
    if backend == "walk_length":
        return walk_length_filtration(shortest_distance_digraph(net, allow_infinite=True), k)
    if backend == "dowker":
        return dowker_sink_filtration(net, k)
    if backend == "dowker_shortest":
        return dowker_sink_filtration(shortest_distance_digraph(net, allow_infinite=True), k)
    if backend == "rips_min":
        return rips_filtration(symmetrize(net, "min"), k)
    if backend == "rips_max":
        return rips_filtration(symmetrize(net, "max"), k)
    raise ValueError(f"unknown backend {backend!r}")


def trial_diagrams(record: TrialRecord, modes, backends, hom_dim: int) -> Dict[Tuple[str, str], PersistenceDiagram]:
    out = {}
    for mode in modes:
        net = preprocess(record.network, mode)
        for backend in backends:
            out[(backend, mode)] = compute_persistence(backend_complex(net, backend, hom_dim), hom_dim)
    return out


@dataclass
class TrialResult:
    label: int
    seed: int
    record: TrialRecord
    diagrams: Dict[Tuple[str, str], PersistenceDiagram]


def run_trial(arena: ArenaConfig, modes, backends, hom_dim: int) -> TrialResult:
    record = simulate_trial(arena)
    return TrialResult(arena.n_holes, arena.rng_seed, record, trial_diagrams(record, modes, backends, hom_dim))


def _run_trial_args(args):
    return run_trial(*args)


def worker_count(default: Optional[int] = None) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    if default is not None:
        return default
    return max(1, min(4, os.cpu_count() or 1))


@dataclass
class ComboReport:
    backend: str
    mode: str
    accuracy: float
    confusion: np.ndarray
    predictions: List[int]
    distances: np.ndarray

    def to_dict(self, labels: Sequence[int]) -> dict:
        return {
            "backend": self.backend,
            "mode": self.mode,
            "accuracy": self.accuracy,
            "confusion": self.confusion.tolist(),
            "per_trial_predictions": [
                {"trial": i, "label": int(t), "predicted": int(p)} for i, (t, p) in enumerate(zip(labels, self.predictions))
            ],
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: List[TrialResult]
    reports: Dict[Tuple[str, str], ComboReport] = field(default_factory=dict)

    @property
    def labels(self) -> List[int]:
        return [t.label for t in self.trials]

    def accuracy_table(self) -> Dict[str, Dict[str, float]]:
        table: Dict[str, Dict[str, float]] = {}
        for (backend, mode), rep in self.reports.items():
            table.setdefault(backend, {})[mode] = rep.accuracy
        return table

    def report_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "accuracy_table": self.accuracy_table(),
            "reports": [rep.to_dict(self.labels) for rep in self.reports.values()],
        }


def classify_diagrams(
    diagrams: Sequence[PersistenceDiagram], labels: Sequence[int], hom_dim: int, k: int = 4
) -> Tuple[float, np.ndarray, List[int], np.ndarray]:
    dm = distance_matrix(diagrams, hom_dim)
    acc, conf, pred = knn_classify(dm, labels, k)
    return acc, conf, pred, dm


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentResult:
    """Simulate every trial, compute diagrams per (backend, mode), then classify.

    Trials run in a process pool of ``workers`` (default from the
    ``WALKLENGTH_WORKERS`` environment variable); results are independent of
    the pool size.
    """
    jobs = [(arena, cfg.modes, cfg.backends, cfg.hom_dim) for arena in cfg.arena_configs()]
    n = worker_count(workers)
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            trials = list(pool.map(_run_trial_args, jobs))
    else:
        trials = [_run_trial_args(j) for j in jobs]
    result = ExperimentResult(cfg, trials)
    labels = result.labels
    for backend in cfg.backends:
        for mode in cfg.modes:
            diagrams = [t.diagrams[(backend, mode)] for t in trials]
            acc, conf, pred, dm = classify_diagrams(diagrams, labels, cfg.hom_dim, cfg.knn_k)
            result.reports[(backend, mode)] = ComboReport(backend, mode, acc, conf, pred, dm)
    return result


# -- trial artifacts ----------------------------------------------------------------


def diagram_filename(backend: str, mode: str) -> str:
    return f"{backend}__{mode}.csv"


def trial_dirname(label: int, index: int) -> str:
    return f"trial_h{label}_{index:03d}"


def write_trial(directory, result: TrialResult, index: int, hom_dim: int) -> Path:
    d = Path(directory)
    (d / "diagrams").mkdir(parents=True, exist_ok=True)
    rec = result.record
    np.savetxt(d / "spikes.csv", rec.spikes, fmt="%d", delimiter=",")
    (d / "network.csv").write_text(wio.format_matrix(rec.network.weights))
    for (backend, mode), dgm in result.diagrams.items():
        (d / "diagrams" / diagram_filename(backend, mode)).write_text(wio.format_diagram(dgm))
    meta = {
        "label": result.label,
        "seed": result.seed,
        "index": index,
        "hom_dim": hom_dim,
        "n_cells": int(rec.spikes.shape[0]),
        "holes": [list(h) for h in rec.holes],
        "arena": rec.config.to_dict() if rec.config is not None else None,
    }
    (d / "metadata.json").write_text(json.dumps(meta, indent=2))
    return d


def write_experiment(root, result: ExperimentResult) -> List[Path]:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    (root / "config.json").write_text(json.dumps(result.config.to_dict(), indent=2))
    paths = []
    per_label: Dict[int, int] = {}
    for trial in result.trials:
        idx = per_label.get(trial.label, 0)
        per_label[trial.label] = idx + 1
        paths.append(write_trial(root / trial_dirname(trial.label, idx), trial, idx, result.config.hom_dim))
    return paths


def find_trial_dirs(paths: Sequence) -> List[Path]:
    """Trial directories among ``paths``, descending one level into experiment roots."""
    out = []
    for p in map(Path, paths):
        if (p / "metadata.json").exists():
            out.append(p)
        else:
            out.extend(sorted(c for c in p.iterdir() if (c / "metadata.json").exists()))
    return out


def load_trial_diagrams(trial_dirs: Sequence[Path], backend: str, mode: str) -> Tuple[List[int], List[PersistenceDiagram]]:
    labels, diagrams = [], []
    for d in trial_dirs:
        meta = json.loads((Path(d) / "metadata.json").read_text())
        labels.append(int(meta["label"]))
        diagrams.append(wio.parse_diagram((Path(d) / "diagrams" / diagram_filename(backend, mode)).read_text()))
    return labels, diagrams


def available_combos(trial_dir: Path) -> List[Tuple[str, str]]:
    out = []
    for f in sorted((Path(trial_dir) / "diagrams").glob("*__*.csv")):
        backend, mode = f.stem.split("__")
        out.append((backend, mode))
    return out
