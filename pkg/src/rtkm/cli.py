"""Command-line surface: single fits, multi-seed alpha-sensitivity
sweeps, and metric evaluation of stored results.

Result artifacts are deterministic: the same flags and seed always
produce byte-identical files.  Wall time is reported on stderr only so
it never perturbs the artifact.
"""

import argparse
import csv
import hashlib
import json
import sys
import time

import numpy as np

from . import data as datamod
from .metrics import Clustering, MetricError, average_f1, clustering_from_result, me_score
from .solver import ALGORITHMS, ConfigError, SolverConfig

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _add_dataset_args(parser):
    src = parser.add_argument_group("dataset")
    src.add_argument("--data", help="CSV file of points (rows = records)")
    src.add_argument("--labels", help="label spec: col:J or last:K")
    src.add_argument("--outlier-classes",
                     help="comma-separated class indices treated as outliers")
    src.add_argument("--synth",
                     help="synthetic spec, e.g. k=3,points=50,outliers=2,seed=0 "
                          "(keys: k,dim,points,outliers,spread,separation,box_scale,seed)")
    src.add_argument("--standardize", action="store_true",
                     help="z-score each feature before fitting")


def _add_config_args(parser):
    cfg = parser.add_argument_group("solver config")
    cfg.add_argument("--k", type=int, required=True)
    cfg.add_argument("--s", type=int, default=1)
    cfg.add_argument("--alpha", type=float, default=0.0)
    cfg.add_argument("--step-d", type=float, default=1.1)
    cfg.add_argument("--step-e", type=float, default=1.1)
    cfg.add_argument("--max-iters", type=int, default=500)
    cfg.add_argument("--tol", type=float, default=1e-8)
    cfg.add_argument("--seed", type=int, default=0)
    cfg.add_argument("--init", choices=("random-points", "kmeans++"),
                     default="random-points")


def build_parser():
    parser = argparse.ArgumentParser(prog="rtkm",
                                     description="Robust trimmed k-means toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="run one clustering fit")
    p_fit.add_argument("--algorithm", choices=sorted(ALGORITHMS), required=True)
    _add_dataset_args(p_fit)
    _add_config_args(p_fit)
    p_fit.add_argument("--out", required=True, help="result JSON path")

    p_sweep = sub.add_parser("sweep", help="alpha-sensitivity sweep with restarts")
    p_sweep.add_argument("--algorithm", choices=sorted(ALGORITHMS), required=True)
    _add_dataset_args(p_sweep)
    _add_config_args(p_sweep)
    p_sweep.add_argument("--alpha-grid", required=True,
                         help="comma-separated alpha values in [0,1)")
    p_sweep.add_argument("--restarts", type=int, default=10)
    p_sweep.add_argument("--out", required=True, help="sweep CSV path")

    p_eval = sub.add_parser("eval", help="score a stored result against ground truth")
    p_eval.add_argument("--result", required=True, help="result JSON from 'fit'")
    _add_dataset_args(p_eval)
    p_eval.add_argument("--out", help="metrics JSON path (default: stdout)")
    return parser


def parse_synth_spec(text):
    defaults = {"k": 3, "dim": 2, "points": 50, "outliers": 2, "spread": 0.5,
                "separation": 10.0, "box_scale": 10.0, "seed": 0}
    ints = {"k", "dim", "points", "outliers", "seed"}
    out = dict(defaults)
    for item in text.split(","):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in defaults or not value:
            raise datamod.DataError(f"bad synth spec item {item!r}")
        try:
            out[key] = int(value) if key in ints else float(value)
        except ValueError:
            raise datamod.DataError(f"bad synth spec value {item!r}") from None
    return out


def load_dataset(args):
    """Resolve the dataset flags into (Dataset, identity dict)."""
    if (args.data is None) == (args.synth is None):
        raise datamod.DataError("provide exactly one of --data or --synth")
    if args.synth is not None:
        spec = parse_synth_spec(args.synth)
        dataset = datamod.generate_synthetic(datamod.blob_spec(**spec))
        identity = {"synth": spec}
    else:
        table = datamod.load_csv(args.data, datamod.parse_label_spec(args.labels))
        outlier_classes = frozenset()
        if args.outlier_classes:
            outlier_classes = frozenset(int(c) for c in args.outlier_classes.split(","))
        dataset = datamod.to_dataset(table, outlier_classes)
        with open(args.data, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        identity = {"path": args.data, "sha256": digest,
                    "labels": args.labels,
                    "outlier_classes": sorted(outlier_classes)}
    if args.standardize:
        dataset = datamod.standardize(dataset)
    return dataset, identity


def make_config(args, alpha=None, seed=None):
    return SolverConfig(
        k=args.k, s=args.s,
        alpha=args.alpha if alpha is None else alpha,
        step_d=args.step_d, step_e=args.step_e,
        max_iters=args.max_iters, tol=args.tol,
        seed=args.seed if seed is None else seed,
        init=args.init,
    )


def config_dict(config):
    return {
        "k": config.k, "s": config.s, "alpha": config.alpha,
        "step_d": config.step_d, "step_e": config.step_e,
        "max_iters": config.max_iters, "tol": config.tol,
        "seed": config.seed, "init": config.init, "w_init": config.w_init,
    }


def truth_clustering(dataset):
    if dataset.truth_memberships is None:
        raise datamod.DataError("dataset carries no ground-truth memberships")
    n_true = max((max(s) + 1 for s in dataset.truth_memberships if s), default=0)
    flags = dataset.truth_outliers
    if flags is None:
        flags = np.zeros(dataset.n_points, dtype=bool)
    return clustering_from_result(dataset.truth_memberships, n_true, flags)


def predicted_clustering(result):
    return clustering_from_result(result.hard_assignments,
                                  result.memberships.shape[0],
                                  result.outlier_flags)


def _write_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_fit(args):
    dataset, identity = load_dataset(args)
    config = make_config(args)
    started = time.perf_counter()
    result = ALGORITHMS[args.algorithm](dataset, config)
    elapsed = time.perf_counter() - started
    artifact = {
        "manifest": {
            "command": "fit",
            "algorithm": args.algorithm,
            "config": config_dict(config),
            "dataset": identity,
            "standardize": bool(args.standardize),
        },
        "result": {
            "objective": result.objective_trace[-1],
            "objective_trace": list(result.objective_trace),
            "iterations": result.iterations,
            "converged": result.converged,
            "stop_reason": result.stop_reason,
            "centers": result.centers.tolist(),
            "hard_assignments": [sorted(s) for s in result.hard_assignments],
            "outlier_indices": np.flatnonzero(result.outlier_flags).tolist(),
            "inlier_weights": result.inliers.tolist(),
            "n_points": dataset.n_points,
            "k": config.k,
        },
    }
    _write_json(artifact, args.out)
    print(f"fit: {args.algorithm} converged={result.converged} "
          f"iters={result.iterations} objective={result.objective_trace[-1]:.6g} "
          f"({elapsed:.2f}s)", file=sys.stderr)
    return 0


def _stats(values):
    if not values:
        return ["", "", ""]
    return [repr(min(values)), repr(float(np.mean(values))), repr(max(values))]


def cmd_sweep(args):
    dataset, identity = load_dataset(args)
    truth = truth_clustering(dataset)
    has_outlier_truth = (dataset.truth_outliers is not None
                         and 0 < dataset.truth_outliers.sum() < dataset.n_points)
    grid = [float(a) for a in args.alpha_grid.split(",")]
    if args.restarts < 1:
        raise datamod.DataError("--restarts must be >= 1")

    rows = []
    for alpha in grid:
        f1s, mes = [], []
        for r in range(args.restarts):
            config = make_config(args, alpha=alpha, seed=args.seed + r)
            try:
                result = ALGORITHMS[args.algorithm](dataset, config)
                f1s.append(average_f1(predicted_clustering(result), truth))
                if has_outlier_truth:
                    mes.append(me_score(result.outlier_flags, dataset.truth_outliers))
            except (ConfigError, MetricError, FloatingPointError) as exc:
                print(f"warning: alpha={alpha} seed={config.seed} failed: {exc}",
                      file=sys.stderr)
        rows.append([repr(alpha), str(args.restarts)] + _stats(f1s) + _stats(mes))

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "restarts", "f1_min", "f1_mean", "f1_max",
                         "me_min", "me_mean", "me_max"])
        writer.writerows(rows)
    print(f"sweep: wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_eval(args):
    dataset, identity = load_dataset(args)
    truth = truth_clustering(dataset)
    with open(args.result) as fh:
        artifact = json.load(fh)
    res = artifact["result"]
    if res["n_points"] != dataset.n_points:
        raise datamod.DataError(
            f"result has {res['n_points']} points but dataset has {dataset.n_points}")
    flags = np.zeros(dataset.n_points, dtype=bool)
    flags[res["outlier_indices"]] = True
    predicted = clustering_from_result(
        [frozenset(s) for s in res["hard_assignments"]], res["k"], flags)
    metrics = {"average_f1": average_f1(predicted, truth)}
    if (dataset.truth_outliers is not None
            and 0 < dataset.truth_outliers.sum() < dataset.n_points):
        metrics["me_score"] = me_score(flags, dataset.truth_outliers)
    _write_json({"dataset": identity, "metrics": metrics}, args.out)
    return 0


COMMANDS = {"fit": cmd_fit, "sweep": cmd_sweep, "eval": cmd_eval}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (datamod.DataError, MetricError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
