"""Command-line front end.

Every command writes plot-ready CSV/JSON plus a ``<command>.manifest.json``
next to its outputs; ``qkmeans rerun <manifest>`` replays it. The default
output directory is ``$QKMEANS_OUTPUT_DIR`` or the current directory.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .backend import BackendError, get_profile
from .cluster import (
    ClusterConfig,
    classical_nn,
    init_centroids,
    kmeans_classical,
    kmeans_quantum,
    nn_classify,
)
from .data import (
    DataError,
    Dataset,
    elbow_curve,
    gen_clusters,
    load_csv,
    load_labels,
    pca_fit,
    pca_transform,
    save_csv,
    save_labels,
)
from .dist import EstimatorConfig, build_swap_test, estimate_many, job_seed
from .embed import EMBEDDINGS, VectorPair
from .metrics import align_labels, confusion, scores
from .qsim import NoiseModel, resources

OUTPUT_ENV = "QKMEANS_OUTPUT_DIR"

#: Shot counts on the x-axis of the shot-count benchmark.
DEFAULT_SHOTS = [10, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000, 2000, 3000,
                 4000, 5000, 6000, 7000, 8000, 8192, 12000, 16000, 24000, 32000]
DEFAULT_COORDS = list(range(1, 11))
DEFAULT_DIMS = {"amplitude": [2, 4, 8, 16, 32], "angle": list(range(2, 27, 2))}

BENCH_COLUMNS = ["sweep_value", "mean", "stddev", "trials", "shots", "embedding", "mode",
                 "analytic"]


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------- sweeps

def sweep_pair(kind: str, value, dim: int, coord: float) -> VectorPair:
    """Vector pair for one point of a benchmark sweep.

    shots:     e1 vs (1,...,1) in ``dim`` dimensions
    distance:  (1,...,1) vs (value,...,value)
    dimension: (1,...,1) vs (coord,...,coord) in ``value`` dimensions
    """
    if kind == "shots":
        a = np.zeros(dim)
        a[0] = 1.0
        return VectorPair(a, np.ones(dim))
    if kind == "distance":
        return VectorPair(np.ones(dim), np.full(dim, float(value)))
    if kind == "dimension":
        return VectorPair(np.ones(int(value)), np.full(int(value), float(coord)))
    raise UsageError(f"unknown sweep kind {kind!r}")


def bench_sweep(kind: str, values, embedding: str = "amplitude", trials: int = 100,
                shots: int = 2048, profile=None, seed: int = 0, dim: int = 2,
                coord: float = 2.0, noise: NoiseModel | None = None,
                block_size="full", mitigate: bool = False) -> list[dict]:
    """Sampled squared-distance statistics over ``trials`` runs per sweep value."""
    profile = profile or get_profile("ideal")
    rows = []
    for i, value in enumerate(values):
        pair = sweep_pair(kind, value, dim, coord)
        n_shots = int(value) if kind == "shots" else shots
        base = EstimatorConfig(embedding=embedding, mode="analytic", block_size=block_size)
        analytic = estimate_many([pair], base, profile)[0].sq_distance
        cfg = EstimatorConfig(embedding=embedding, mode="sampled", shots=n_shots,
                              block_size=block_size, noise=noise, mitigate=mitigate)
        est = estimate_many([pair] * trials, cfg, profile, job_seed(seed, i))
        sq = np.array([e.sq_distance for e in est])
        rows.append({
            "sweep_value": value, "mean": float(sq.mean()), "stddev": float(sq.std()),
            "trials": trials, "shots": n_shots, "embedding": embedding, "mode": "sampled",
            "analytic": analytic,
        })
    return rows


def resource_rows(dims, embeddings=EMBEDDINGS) -> list[dict]:
    rows = []
    for n in dims:
        for emb in embeddings:
            a = np.zeros(n)
            a[0] = 1.0
            stats = resources(build_swap_test(VectorPair(a, np.ones(n)), emb))
            rows.append({"dim": n, "embedding": emb, "width": stats.width,
                         "depth": stats.depth, "nonlocal": stats.nonlocal_gates})
    return rows


# --------------------------------------------------------------------------- io

def _write_rows(path: Path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _noise_override(args) -> NoiseModel | None:
    fields = ("p01", "p10", "lambda1", "lambda2")
    given = {f: getattr(args, f) for f in fields if getattr(args, f, None) is not None}
    if not given:
        return None
    base = get_profile(args.profile, args.profile_config).noise
    return NoiseModel(**{**asdict(base), **given})


def _estimator(args, default_reps: int = 1) -> EstimatorConfig:
    if args.estimator == "subspace":
        block = args.block if args.block is not None else 2
    else:
        if args.block is not None and args.block != "full":
            raise UsageError("--block needs --estimator subspace")
        block = "full"
    mode = args.mode
    reps = args.reps if args.reps is not None else default_reps
    return EstimatorConfig(embedding=args.embedding, mode=mode, shots=args.shots,
                           repetitions=reps, block_size=block, noise=_noise_override(args),
                           mitigate=args.mitigate, pack=not args.no_pack,
                           workers=args.workers)


# --------------------------------------------------------------------------- commands

def cmd_gen(args, out: Path) -> list[Path]:
    ds = gen_clusters(args.k, args.per, args.dim, args.variance, args.min_sep, args.seed,
                      (args.box_lo, args.box_hi))
    path = out / args.out
    save_csv(ds, path)
    return [path]


def cmd_bench(args, out: Path) -> list[Path]:
    profile = get_profile(args.profile, args.profile_config)
    if args.values:
        values = [float(v) if args.kind == "distance" else int(v) for v in args.values]
    elif args.kind == "shots":
        values = DEFAULT_SHOTS
    elif args.kind == "distance":
        values = DEFAULT_COORDS
    else:
        values = DEFAULT_DIMS[args.embedding]
    block = args.block if args.estimator == "subspace" else "full"
    rows = bench_sweep(args.kind, values, args.embedding, args.trials, args.shots, profile,
                       args.seed, args.dim, args.coord, _noise_override(args), block,
                       args.mitigate)
    path = out / (args.out or f"bench_{args.kind}_{args.embedding}.csv")
    _write_rows(path, BENCH_COLUMNS, rows)
    return [path]


def cmd_resources(args, out: Path) -> list[Path]:
    rows = resource_rows(args.dims, EMBEDDINGS if args.embedding == "both" else [args.embedding])
    path = out / args.out
    _write_rows(path, ["dim", "embedding", "width", "depth", "nonlocal"], rows)
    return [path]


def _confusion_outputs(out: Path, prefix: str, truth, pred, align: bool) -> tuple[list, dict]:
    pred = np.asarray(pred)
    if align:
        pred = align_labels(truth, pred)[pred]
    cm = confusion(truth, pred)
    (out / f"{prefix}confusion.json").write_text(cm.to_json() + "\n", encoding="utf-8")
    (out / f"{prefix}confusion.csv").write_text(cm.to_csv(), encoding="utf-8")
    return [out / f"{prefix}confusion.json", out / f"{prefix}confusion.csv"], scores(cm)


def cmd_cluster(args, out: Path) -> list[Path]:
    ds = load_csv(args.data)
    profile = get_profile(args.profile, args.profile_config)
    cfg = ClusterConfig(args.k, args.epsilon, args.max_iter, args.tol, _estimator(args),
                        args.seed)
    init = init_centroids(ds.points, args.k, args.epsilon, args.seed)
    run = kmeans_quantum(ds.points, cfg, profile, init=init)
    if args.baseline:
        baseline = load_labels(args.baseline)
    else:
        baseline = kmeans_classical(ds.points, cfg, init=init).labels
    p = args.prefix
    save_labels(run.labels, out / f"{p}labels.csv")
    files, sc = _confusion_outputs(out, p, baseline, run.labels, args.align)
    _write_json(out / f"{p}run.json", {**run.to_dict(), "scores": sc,
                                       "profile": profile.name})
    return [out / f"{p}labels.csv", out / f"{p}run.json", *files]


def cmd_classify(args, out: Path) -> list[Path]:
    profile = get_profile(args.profile, args.profile_config)
    if args.centroids:
        centroids = load_csv(args.centroids).points
    elif args.train:
        train = load_csv(args.train)
        cfg = ClusterConfig(args.k, args.epsilon, args.max_iter, args.tol, seed=args.seed)
        centroids = kmeans_classical(train.points, cfg).centroids
    else:
        raise UsageError("classify needs --train or --centroids")
    test = load_csv(args.test)
    labels = nn_classify(test.points, centroids, _estimator(args, default_reps=5), profile,
                         args.seed)
    baseline = load_labels(args.baseline) if args.baseline else classical_nn(test.points,
                                                                             centroids)
    p = args.prefix
    save_labels(labels, out / f"{p}labels.csv")
    save_csv(Dataset(centroids), out / f"{p}centroids.csv")
    files, sc = _confusion_outputs(out, p, baseline, labels, args.align)
    _write_json(out / f"{p}scores.json", sc)
    return [out / f"{p}labels.csv", out / f"{p}centroids.csv", out / f"{p}scores.json", *files]


def cmd_pca(args, out: Path) -> list[Path]:
    ds = load_csv(args.data)
    model = pca_fit(ds, args.dim)
    (out / f"{args.prefix}pca.json").write_text(model.to_json() + "\n", encoding="utf-8")
    save_csv(pca_transform(model, ds), out / f"{args.prefix}pca.csv")
    return [out / f"{args.prefix}pca.json", out / f"{args.prefix}pca.csv"]


def cmd_elbow(args, out: Path) -> list[Path]:
    ds = load_csv(args.data)
    curve = elbow_curve(ds, args.k_max, args.seed, args.n_init)
    path = out / args.out
    _write_rows(path, ["k", "wcss"], [{"k": k, "wcss": w} for k, w in enumerate(curve, 1)])
    return [path]


def cmd_report(args, out: Path) -> list[Path]:
    truth, pred = load_labels(args.true), load_labels(args.pred)
    files, sc = _confusion_outputs(out, args.prefix, truth, pred, args.align)
    _write_json(out / f"{args.prefix}scores.json", sc)
    return [out / f"{args.prefix}scores.json", *files]


COMMANDS = {
    "gen": cmd_gen, "bench": cmd_bench, "resources": cmd_resources, "cluster": cmd_cluster,
    "classify": cmd_classify, "pca": cmd_pca, "elbow": cmd_elbow, "report": cmd_report,
}


# --------------------------------------------------------------------------- parser

def _block(text: str):
    if text == "full":
        return "full"
    value = int(text)
    if value < 2 or value % 2:
        raise argparse.ArgumentTypeError("block must be 'full' or an even integer >= 2")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", help=f"output directory (default ${OUTPUT_ENV} or .)")
    p.add_argument("--seed", type=int, default=0)


def _add_backend(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", default="ideal", help="backend profile name")
    p.add_argument("--profile-config", help="INI file with extra backend profiles")
    for name in ("p01", "p10", "lambda1", "lambda2"):
        p.add_argument(f"--{name}", type=float, help=f"override the profile's {name}")
    p.add_argument("--mitigate", action="store_true", help="apply readout mitigation")


def _add_estimator(p: argparse.ArgumentParser, default_shots: int, reps_help: str) -> None:
    p.add_argument("--embedding", choices=EMBEDDINGS, default="amplitude")
    p.add_argument("--estimator", choices=("full", "subspace"), default="full")
    p.add_argument("--block", type=_block, default=None,
                   help="block length for --estimator subspace (even, default 2)")
    p.add_argument("--mode", choices=("sampled", "analytic"), default="sampled")
    p.add_argument("--shots", type=int, default=default_shots)
    p.add_argument("--reps", type=int, default=None, help=reps_help)
    p.add_argument("--workers", type=int, default=None,
                   help="submit one circuit per request from N workers")
    p.add_argument("--no-pack", action="store_true",
                   help="do not pack subspace block circuits side by side")
    p.add_argument("--align", action="store_true",
                   help="permute predicted labels to best match the baseline first")
    p.add_argument("--prefix", default="", help="prefix for output file names")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkmeans", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, **kwargs):
        # repeat the one-line summary, which lists output columns, under "<cmd> --help"
        return sub.add_parser(name, help=help, epilog=f"outputs: {help}", **kwargs)

    p = add("gen", help="synthetic Gaussian clusters -> CSV f0..f{d-1},label")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--per", type=int, required=True, help="points per cluster")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--variance", type=float, default=0.1)
    p.add_argument("--min-sep", type=float, default=0.0)
    p.add_argument("--box-lo", type=float, default=0.0)
    p.add_argument("--box-hi", type=float, default=10.0)
    p.add_argument("--out", default="data.csv")

    p = add(
        "bench", help="distance-estimation sweep -> CSV " + ",".join(BENCH_COLUMNS),
        description="mean/stddev of sampled squared distances over --trials runs; "
                    "'analytic' is the exact noiseless value")
    _add_common(p)
    _add_backend(p)
    p.add_argument("--kind", choices=("shots", "distance", "dimension"), required=True)
    p.add_argument("--values", nargs="+", help="sweep values (shots / coordinate / dimension)")
    p.add_argument("--embedding", choices=EMBEDDINGS, default="amplitude")
    p.add_argument("--estimator", choices=("full", "subspace"), default="full")
    p.add_argument("--block", type=_block, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--shots", type=int, default=2048)
    p.add_argument("--dim", type=int, default=2, help="dimension for shots/distance sweeps")
    p.add_argument("--coord", type=float, default=2.0,
                   help="coordinate of the far point in the dimension sweep")
    p.add_argument("--out")

    p = add("resources", help="width/depth/nonlocal table -> CSV "
                                         "dim,embedding,width,depth,nonlocal")
    _add_common(p)
    p.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    p.add_argument("--embedding", choices=(*EMBEDDINGS, "both"), default="both")
    p.add_argument("--out", default="resources.csv")

    p = add("cluster", help="quantum k-means -> labels.csv, run.json, "
                                       "confusion.{json,csv}")
    _add_common(p)
    _add_backend(p)
    _add_estimator(p, 8192, "estimates averaged per distance (default 1)")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--max-iter", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--baseline", help="baseline labels CSV (default: classical run, same init)")

    p = add("classify", help="nearest-centroid prediction -> labels.csv, "
                                        "centroids.csv, scores.json, confusion.{json,csv}")
    _add_common(p)
    _add_backend(p)
    _add_estimator(p, 8192, "estimates averaged per distance (default 5)")
    p.add_argument("--train", help="training CSV; centroids come from classical k-means")
    p.add_argument("--centroids", help="CSV of centroids (overrides --train)")
    p.add_argument("--test", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--baseline", help="baseline labels CSV (default: classical prediction)")

    p = add("pca", help="PCA -> pca.json (mean, components, ratios), pca.csv")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--prefix", default="")

    p = add("elbow", help="classical WCSS per k -> CSV k,wcss")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--n-init", type=int, default=5)
    p.add_argument("--out", default="elbow.csv")

    p = add("report", help="scores of two label files -> scores.json, "
                                      "confusion.{json,csv}")
    _add_common(p)
    p.add_argument("--true", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--align", action="store_true")
    p.add_argument("--prefix", default="")

    p = add("rerun", help="replay a run manifest")
    p.add_argument("manifest")
    return parser


def run(argv) -> list[Path]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "rerun":
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        return run(manifest["argv"])
    out = _out_dir(args)
    started = time.time()
    outputs = COMMANDS[args.command](args, out)
    manifest = {
        "command": args.command,
        "argv": list(argv) if args.out_dir else [*argv, "--out-dir", str(out)],
        "config": {k: v for k, v in vars(args).items()},
        "seed": args.seed,
        "profile": getattr(args, "profile", None),
        "started": started,
        "finished": time.time(),
        "outputs": [str(p) for p in outputs],
        "version": __version__,
    }
    path = out / f"{args.prefix if hasattr(args, 'prefix') else ''}{args.command}.manifest.json"
    _write_json(path, manifest)
    return outputs + [path]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        for path in run(argv):
            print(path)
    except (UsageError, DataError, BackendError, KeyError, ValueError, OSError) as exc:
        print(f"qkmeans: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
