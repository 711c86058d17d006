"""Command-line interface.

Exit status is 0 on success, 1 on a domain error (bad graph, non-monotone
filtration, search too large, ...) and 2 on a usage error.  Inputs named ``-``
or omitted are read from standard input, so subcommands can be piped::

    walklength generate cycle 6 | walklength persistence --hom-dim 1
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import io as wio
from .digraph import shortest_distance_digraph, symmetrize, validate
from .errors import WalkLengthError
from .experiments.classify import knn_classify, single_linkage
from .experiments.generators import FIXTURES, make_cycle_network, make_modified_cycle_network, make_paper_fixture
from .experiments.pipeline import (
    ExperimentConfig,
    available_combos,
    find_trial_dirs,
    load_trial_diagrams,
    run_experiment,
    write_experiment,
)
from .filtrations import FILTRATIONS
from .metrics import bottleneck_distance, distance_matrix, search_network_distance
from .persistence import compute_persistence

NETWORK_KINDS = {"dnet-inf": "inf", "dnet-l1": "l1", "dnet-l1-map": "l1_map", "dnet-l1-bij": "l1_bij"}


def _read(path: Optional[str]) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(text: str, out: Optional[str]) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _filtration(graph, method: str, max_dim: int):
    builder = FILTRATIONS[method]
    if method == "walk-length":
        graph = shortest_distance_digraph(graph, allow_infinite=True)
    return builder(graph, max_dim)


def cmd_shortest(args) -> int:
    g = validate(wio.parse_graph(_read(args.input)), strict=not args.lenient)
    sd = shortest_distance_digraph(g, allow_infinite=args.allow_infinite)
    _emit(wio.format_matrix(sd.weights), args.output)
    return 0


def cmd_filtration(args) -> int:
    g = validate(wio.parse_graph(_read(args.input)), strict=not args.lenient)
    if args.method == "rips" and args.symmetrize:
        g = symmetrize(g, args.symmetrize)
    fc = _filtration(g, args.method, args.max_dim)
    _emit(wio.format_filtration(fc), args.output)
    return 0


def cmd_persistence(args) -> int:
    text = _read(args.input)
    if wio.detect_format(text) == "filtration":
        fc = wio.parse_filtration(text)
    else:
        g = validate(wio.parse_graph(text), strict=not args.lenient)
        if args.method == "rips" and args.symmetrize:
            g = symmetrize(g, args.symmetrize)
        fc = _filtration(g, args.method, args.hom_dim)
    dgm = compute_persistence(fc, args.hom_dim)
    if args.only_dim:
        dgm = dgm.restrict(args.hom_dim)
    _emit(wio.format_diagram(dgm), args.output)
    return 0


def cmd_distance(args) -> int:
    if args.kind == "bottleneck":
        d1 = wio.parse_diagram(_read(args.first))
        d2 = wio.parse_diagram(_read(args.second))
        dims = [args.dim] if args.dim is not None else sorted(set(d1.dims()) | set(d2.dims())) or [0]
        value = max(bottleneck_distance(d1, d2, d) for d in dims)
        _emit(wio.fmt(value) + "\n", args.output)
        return 0
    X = wio.parse_graph(_read(args.first))
    Y = wio.parse_graph(_read(args.second))
    res = search_network_distance(X, Y, NETWORK_KINDS[args.kind])
    if args.json:
        text = res.to_json()
    else:
        text = wio.fmt(res.raw_objective if args.raw_objective else res.value)
    _emit(text + "\n", args.output)
    return 0


def cmd_generate(args) -> int:
    if args.family == "cycle":
        g = make_cycle_network(args.n)
    elif args.family == "modified-cycle":
        g = make_modified_cycle_network(args.n, args.back_weight)
    else:
        g = make_paper_fixture(args.name, args.eps)
    _emit(wio.format_matrix(g.weights), args.output)
    return 0


def cmd_simulate(args) -> int:
    data = json.loads(_read(args.config)) if args.config else {}
    if args.seed is not None:
        data["seed"] = args.seed
    if args.profile is not None:
        data["profile"] = args.profile
    cfg = ExperimentConfig.from_dict(data)
    result = run_experiment(cfg, workers=args.workers)
    paths = write_experiment(args.out, result)
    for p in paths:
        print(p)
    return 0


def cmd_classify(args) -> int:
    dirs = find_trial_dirs(args.trials)
    if not dirs:
        print("no trial directories found", file=sys.stderr)
        return 1
    combos = available_combos(dirs[0])
    if args.backend:
        combos = [c for c in combos if c[0] == args.backend]
    if args.mode:
        combos = [c for c in combos if c[1] == args.mode]
    if not combos:
        print("no diagrams match the requested backend/mode", file=sys.stderr)
        return 1
    reports = []
    for backend, mode in combos:
        labels, diagrams = load_trial_diagrams(dirs, backend, mode)
        dm = distance_matrix(diagrams, args.hom_dim)
        acc, conf, pred = knn_classify(dm, labels, args.k)
        reports.append(
            {
                "backend": backend,
                "mode": mode,
                "accuracy": acc,
                "confusion": conf.tolist(),
                "per_trial_predictions": [
                    {"trial": str(d), "label": int(t), "predicted": int(p)} for d, t, p in zip(dirs, labels, pred)
                ],
            }
        )
        if args.distance_dir:
            out = Path(args.distance_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{backend}__{mode}.csv").write_text(wio.format_matrix(dm))
    report = reports[0] if len(reports) == 1 else {"reports": reports}
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return 0


def cmd_cluster(args) -> int:
    dm = wio.parse_matrix(_read(args.input))
    labels, merges = single_linkage(dm, args.threshold)
    _emit(wio.format_linkage(merges), args.output)
    if args.labels_out:
        Path(args.labels_out).write_text("\n".join(str(x) for x in labels) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="walklength", description="Walk-length persistence for weighted digraphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def io_args(sp, with_input=True):
        if with_input:
            sp.add_argument("input", nargs="?", default="-", help="input CSV (default: stdin)")
        sp.add_argument("-o", "--output", default="-", help="output path (default: stdout)")
        sp.add_argument("--lenient", action="store_true", help="warn instead of failing on zero off-diagonal weights")

    sp = sub.add_parser("shortest", help="shortest-distance matrix of a graph")
    io_args(sp)
    sp.add_argument("--allow-infinite", action="store_true", help="keep unreachable pairs as inf")
    sp.set_defaults(func=cmd_shortest)

    methods = sorted(FILTRATIONS)
    sp = sub.add_parser("filtration", help="filtration dump of a graph")
    io_args(sp)
    sp.add_argument("--method", choices=methods, default="walk-length")
    sp.add_argument("--max-dim", type=int, default=1, help="K: simplices up to dimension K + 1")
    sp.add_argument("--symmetrize", choices=["min", "max"], help="symmetrize before Rips")
    sp.set_defaults(func=cmd_filtration)

    sp = sub.add_parser("persistence", help="persistence diagram of a graph or filtration dump")
    io_args(sp)
    sp.add_argument("--method", choices=methods, default="walk-length")
    sp.add_argument("--hom-dim", type=int, default=1)
    sp.add_argument("--only-dim", action="store_true", help="emit only points of dimension --hom-dim")
    sp.add_argument("--symmetrize", choices=["min", "max"], help="symmetrize before Rips")
    sp.set_defaults(func=cmd_persistence)

    sp = sub.add_parser("distance", help="bottleneck or network distance between two inputs")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--kind", choices=["bottleneck", *NETWORK_KINDS], default="bottleneck")
    sp.add_argument("--dim", type=int, help="bottleneck: homology dimension (default: max over all)")
    sp.add_argument("--raw-objective", action="store_true", help="network distances: print the unhalved minimum")
    sp.add_argument("--json", action="store_true", help="network distances: print the full search result")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("generate", help="example networks")
    gen = sp.add_subparsers(dest="family", required=True)
    g1 = gen.add_parser("cycle")
    g1.add_argument("n", type=int)
    g2 = gen.add_parser("modified-cycle")
    g2.add_argument("n", type=int)
    g2.add_argument("back_weight", type=float, nargs="?")
    g3 = gen.add_parser("fixture")
    g3.add_argument("name", choices=sorted(list(FIXTURES) + ["fig2_Xeps"]))
    g3.add_argument("--eps", type=float, default=0.0, help="perturbation for fig2_Xeps")
    for g in (g1, g2, g3):
        g.add_argument("-o", "--output", default="-")
        g.set_defaults(func=cmd_generate)

    sp = sub.add_parser("simulate", help="run the arena experiment and write trial directories")
    sp.add_argument("config", nargs="?", help="experiment config JSON")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--seed", type=int, help="root seed (overrides the config)")
    sp.add_argument("--profile", choices=["desk", "paper"])
    sp.add_argument("--workers", type=int, help="process pool size (default: $WALKLENGTH_WORKERS)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("classify", help="leave-one-out k-NN on trial directories")
    sp.add_argument("trials", nargs="+", help="trial directories or an experiment root")
    sp.add_argument("--backend")
    sp.add_argument("--mode")
    sp.add_argument("--hom-dim", type=int, default=1)
    sp.add_argument("-k", type=int, default=4)
    sp.add_argument("--distance-dir", help="also write the distance matrices here")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("cluster", help="single-linkage merge list of a distance matrix")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--threshold", type=float, default=float("inf"))
    sp.add_argument("--labels-out", help="write flat cluster labels at --threshold here")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_cluster)
    return p


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if getattr(args, "command", None) in ("filtration",) and args.max_dim < 0:
        parser.print_usage(sys.stderr)
        print("walklength: error: --max-dim must be non-negative", file=sys.stderr)
        return 2
    if getattr(args, "hom_dim", 0) is not None and getattr(args, "hom_dim", 0) < 0:
        parser.print_usage(sys.stderr)
        print("walklength: error: --hom-dim must be non-negative", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (WalkLengthError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"walklength: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
