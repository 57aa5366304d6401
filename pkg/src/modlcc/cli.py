"""Command-line interface.

Subcommands: generate, fit, coarsen, density, evaluate, bench.
Exit codes: 0 success, 2 input error, 3 I/O error, 4 consistency-audit failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bench import DESK_CLUSTER_CURVE, DESK_CONVERGENCE, PAPER_CONVERGENCE, ExperimentSpec
from .bench import recovery_fractions, run_cluster_curve, run_convergence_experiment
from .density import estimate_density, information_metrics, modl_mi_estimate, modularity
from .graph import EdgeListError, parse_edge_list
from .hierarchy import build_dendrogram, cut
from .model import Coclustering, ModelError, null_model
from .optimizer import FitConfig, vns_fit
from .synthgen import GeneratorError, GeneratorSpec, generate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3
EXIT_AUDIT = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _read_vocabulary(path: str | None):
    if path is None:
        return None
    labels = []
    for line in _read_text(path).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            labels.append(line.split("\t")[0])
    return labels


def _load_sample(args, vocabulary=None, target_vocabulary=None, unify=None):
    text = _read_text(args.edges)
    try:
        return parse_edge_list(
            text,
            unify=unify if unify is not None else getattr(args, "unify_vertices", False),
            undirected=getattr(args, "undirected", False),
            vocabulary=vocabulary if vocabulary is not None else _read_vocabulary(getattr(args, "vocabulary", None)),
            target_vocabulary=target_vocabulary,
        )
    except EdgeListError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc


def _load_model(args):
    """Read a model JSON and the edge file it was fitted on; audit counts."""
    try:
        data = json.loads(_read_text(args.model))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"invalid model JSON: {exc}") from exc
    sample = _load_sample(
        args,
        vocabulary=data.get("source_labels"),
        target_vocabulary=data.get("target_labels"),
        unify=data.get("unified", False),
    )
    try:
        model = Coclustering.from_dict(data, sample)
    except ModelError as exc:
        code = EXIT_AUDIT if "consistency audit failed" in str(exc) else EXIT_INPUT
        raise CliError(code, str(exc)) from exc
    try:
        model.verify_consistent(sample)
    except ModelError as exc:
        raise CliError(EXIT_AUDIT, str(exc)) from exc
    return model, sample, data


# -- generate -----------------------------------------------------------------


def _generator_spec(args) -> GeneratorSpec:
    if args.family == "circular":
        params = {"n": args.n}
    elif args.family == "block-diagonal":
        params = {"n": args.n, "blocks": args.blocks, "noise_rate": args.noise}
    elif args.family == "blockmodel":
        params = {}
    else:  # undirected-pattern
        params = {
            "cluster_count": args.clusters,
            "cluster_size": args.cluster_size,
            "intra": args.intra,
            "inter": args.inter,
        }
    return GeneratorSpec(args.family.replace("-", "_"), m=args.m, seed=args.seed, params=params)


def cmd_generate(args) -> int:
    spec = _generator_spec(args)
    try:
        sample, truth = generate(spec)
    except GeneratorError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    prefix = args.output
    _write_text(prefix + ".tsv", "".join(sample.expand_lines()))
    lines = []
    truth_labels = None
    if isinstance(truth, np.ndarray) and truth.ndim == 1:
        truth_labels = truth
    elif isinstance(truth, tuple):
        truth_labels = truth[0]
    for i, lab in enumerate(sample.source_labels):
        if truth_labels is not None:
            lines.append(f"{lab}\t{int(truth_labels[i])}\n")
        else:
            lines.append(f"{lab}\n")
    _write_text(prefix + ".labels.tsv", "".join(lines))
    echo = spec.to_dict()
    echo["tool_version"] = __version__
    echo["n_source"] = sample.n_source
    echo["n_target"] = sample.n_target
    echo["edges_written"] = sample.m
    _write_text(prefix + ".spec.json", json.dumps(echo, indent=2) + "\n")
    print(f"wrote {sample.m} edges to {prefix}.tsv ({sample.n_source} vertices)")
    return EXIT_OK


# -- fit --------------------------------------------------------------------------


def cmd_fit(args) -> int:
    sample = _load_sample(args)
    config = FitConfig(rounds=args.rounds, seed=args.seed)
    t0 = time.perf_counter()
    fit = vns_fit(sample, config)
    elapsed = time.perf_counter() - t0
    doc = fit.to_dict(seed=args.seed)
    _write_text(args.output, json.dumps(doc, indent=2) + "\n")
    mi_full, mi_lh = modl_mi_estimate(fit, sample)
    model = fit.best_model
    print(f"clusters: {model.k_source} x {model.k_target}")
    print(f"criterion: {fit.best_criterion.total:.6f} nats")
    print(f"dependence estimate: {mi_full:.6f} nats/edge (likelihood-only {mi_lh:.6f})")
    print(f"time: {elapsed:.3f}s over {args.rounds} rounds (seed {args.seed})")
    print(f"model written to {args.output}")
    return EXIT_OK


# -- coarsen ---------------------------------------------------------------------


def _percentage_table(model: Coclustering) -> str:
    grid = model.cocluster_grid
    m = grid.sum()
    header = "\t" + "\t".join(f"T{j}" for j in range(model.k_target))
    rows = [header]
    for i in range(model.k_source):
        cells = [
            f"{100.0 * grid[i, j] / m:.2f}% ({int(grid[i, j])})" for j in range(model.k_target)
        ]
        rows.append(f"S{i}\t" + "\t".join(cells))
    return "\n".join(rows)


def cmd_coarsen(args) -> int:
    model, sample, _ = _load_model(args)
    try:
        ks, kt = (int(v) for v in args.clusters.split(","))
    except ValueError:
        raise CliError(EXIT_INPUT, f"--clusters must be kS,kT, got {args.clusters!r}") from None
    dend = build_dendrogram(model)
    try:
        cut_model = cut(dend, ks, kt)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    doc = cut_model.to_dict(seed=args.seed)
    doc["requested_clusters"] = [ks, kt]
    doc["merge_path"] = dend.to_dict()["merges"]
    if args.output:
        _write_text(args.output, json.dumps(doc, indent=2) + "\n")
    print(f"cut at {cut_model.k_source} x {cut_model.k_target} "
          f"(requested {ks} x {kt}), criterion {cut_model.criterion().total:.6f} nats")
    print(_percentage_table(cut_model))
    return EXIT_OK


# -- density ----------------------------------------------------------------------


def cmd_density(args) -> int:
    model, sample, _ = _load_model(args)
    est = estimate_density(model)
    if args.cell:
        try:
            i, j = (int(v) for v in args.cell.split(","))
            p = est.p(i, j)
        except (ValueError, IndexError) as exc:
            raise CliError(EXIT_INPUT, f"invalid --cell {args.cell!r}: {exc}") from None
        print(json.dumps({"i": i, "j": j, "p": p}))
        return EXIT_OK
    grid = est.matrix()
    lines = ["\t".join(f"{v:.10g}" for v in row) for row in grid]
    text = "\n".join(lines) + "\n"
    if args.output:
        _write_text(args.output, text)
        print(f"wrote {grid.shape[0]} x {grid.shape[1]} probability grid to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- evaluate -----------------------------------------------------------------------


def cmd_evaluate(args) -> int:
    model, sample, _ = _load_model(args)
    report = information_metrics(estimate_density(model))
    mi_full, mi_lh = modl_mi_estimate(model, sample)
    report.modl_mi = mi_full
    report.modl_mi_likelihood = mi_lh
    if args.modularity:
        if not sample.unified:
            raise CliError(EXIT_INPUT, "modularity requires a unified vertex space")
        report.modularity = modularity(sample, model.source_assignment)
    doc = report.to_dict()
    doc["units"] = "nats"
    if args.bits:
        ln2 = math.log(2.0)
        doc = {k: (v / ln2 if isinstance(v, float) else v) for k, v in doc.items()}
        doc["units"] = "bits"
    doc["tool_version"] = __version__
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        _write_text(args.output, text)
    sys.stdout.write(text)
    return EXIT_OK


# -- bench -----------------------------------------------------------------------------


def cmd_bench(args) -> int:
    if args.experiment == "convergence":
        spec = PAPER_CONVERGENCE if args.paper_scale else DESK_CONVERGENCE
    else:
        spec = DESK_CLUSTER_CURVE
        if args.paper_scale:
            spec = ExperimentSpec(
                family=spec.family,
                sizes=[50, 100, 200, 400, 800, 1600, 3200],
                reps=10,
                params=dict(spec.params),
            )
    if args.sizes:
        spec.sizes = [int(s) for s in args.sizes.split(",")]
        if spec.sizes != sorted(set(spec.sizes)):
            raise CliError(EXIT_INPUT, "--sizes must be strictly increasing")
    if args.reps is not None:
        spec.reps = args.reps
    spec.seed = args.seed
    spec.rounds = args.rounds
    if args.experiment == "clusters":
        for key in ("n", "blocks"):
            v = getattr(args, key)
            if v is not None:
                spec.params[key] = v
        if args.noise is not None:
            spec.params["noise_rate"] = args.noise

    def progress(row):
        print(f"size={row['size']} rep={row['rep']} "
              f"k={row['k_source']}x{row['k_target']} {row['seconds']:.2f}s")

    try:
        if args.experiment == "convergence":
            rows = run_convergence_experiment(spec, output=args.output, progress=progress)
            summary = {"experiment": "convergence", "rows": len(rows)}
        else:
            rows = run_cluster_curve(spec, output=args.output, progress=progress)
            summary = {
                "experiment": "clusters",
                "rows": len(rows),
                "recovery_fraction": recovery_fractions(rows),
            }
    except GeneratorError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    summary["seed"] = spec.seed
    summary["tool_version"] = __version__
    if args.output:
        summary["csv"] = args.output
    print(json.dumps(summary))
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------------


def _add_ingest_flags(p: argparse.ArgumentParser):
    p.add_argument("--unify-vertices", action="store_true",
                   help="sources and targets share one vertex space")
    p.add_argument("--undirected", action="store_true",
                   help="ingest each edge in both directions")
    p.add_argument("--vocabulary", help="file declaring the vertex universe, one label per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modlcc",
                                     description="Graph coclustering and edge-density estimation.")
    parser.add_argument("--version", action="version", version=f"modlcc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic edge sample")
    g.add_argument("family", choices=["circular", "block-diagonal", "blockmodel", "undirected-pattern"])
    g.add_argument("--n", type=int, default=100, help="vertex count (circular, block-diagonal)")
    g.add_argument("--blocks", type=int, default=2, help="block count (block-diagonal)")
    g.add_argument("--noise", type=float, default=0.0, help="noise edge fraction (block-diagonal)")
    g.add_argument("--clusters", type=int, default=4, help="cluster count (undirected-pattern)")
    g.add_argument("--cluster-size", type=int, default=10, help="cluster size (undirected-pattern)")
    g.add_argument("--intra", type=float, default=0.8, help="within-cluster edge proportion")
    g.add_argument("--inter", type=float, default=0.1, help="across-cluster edge proportion")
    g.add_argument("--m", type=int, default=1000, help="number of edges to draw")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True, help="output path prefix")
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("fit", help="fit a coclustering model to an edge list")
    f.add_argument("edges", help="TSV edge list: source<TAB>target[<TAB>count]")
    f.add_argument("-o", "--output", required=True, help="model JSON output path")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--rounds", type=int, default=10)
    f.add_argument("--threads", type=int, default=0, help="0 = auto (results are thread-count independent)")
    _add_ingest_flags(f)
    f.set_defaults(func=cmd_fit)

    c = sub.add_parser("coarsen", help="cut a fitted model at a coarser granularity")
    c.add_argument("model", help="model JSON from fit")
    c.add_argument("edges", help="the edge list the model was fitted on")
    c.add_argument("--clusters", required=True, metavar="KS,KT",
                   help="requested cluster counts, e.g. 5,5")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("-o", "--output", help="cut model JSON output path")
    c.add_argument("--undirected", action="store_true")
    c.set_defaults(func=cmd_coarsen)

    d = sub.add_parser("density", help="edge probabilities of a fitted model")
    d.add_argument("model")
    d.add_argument("edges")
    d.add_argument("--cell", metavar="I,J", help="single vertex pair, JSON output")
    d.add_argument("--full", action="store_true", help="full probability grid, TSV output")
    d.add_argument("-o", "--output")
    d.add_argument("--undirected", action="store_true")
    d.set_defaults(func=cmd_density)

    e = sub.add_parser("evaluate", help="entropy/dependence metrics of a fitted model")
    e.add_argument("model")
    e.add_argument("edges")
    e.add_argument("--bits", action="store_true", help="display values in bits instead of nats")
    e.add_argument("--modularity", action="store_true",
                   help="include the modularity of the source partition (unified samples)")
    e.add_argument("-o", "--output")
    e.add_argument("--undirected", action="store_true")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("bench", help="run a benchmark experiment grid")
    b.add_argument("experiment", choices=["convergence", "clusters"])
    b.add_argument("-o", "--output", help="CSV output path (enables restartability)")
    b.add_argument("--paper-scale", action="store_true", help="full-size experiment grid")
    b.add_argument("--sizes", help="comma-separated sample sizes, strictly increasing")
    b.add_argument("--reps", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--rounds", type=int, default=10)
    b.add_argument("--threads", type=int, default=0)
    b.add_argument("--n", type=int, help="vertex count (clusters experiment)")
    b.add_argument("--blocks", type=int, help="planted block count (clusters experiment)")
    b.add_argument("--noise", type=float, help="noise fraction (clusters experiment)")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (EdgeListError, GeneratorError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
