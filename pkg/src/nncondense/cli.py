"""Command-line entry point: ``nnc generate|condense|verify|evaluate|bench|plot|table``.

Exit codes: 0 ok, 1 a verification failed, 2 I/O error, 3 invalid dataset,
4 dataset/subset provenance mismatch, 5 unsupported dimension.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bench, plot
from .condense import CONDENSERS, Algorithm, Subset, condense
from .dataset import (
    CsvOptions,
    InvalidInputError,
    TrainingSet,
    UnsupportedDimensionError,
    gen_circle,
    gen_mss_adversarial,
    gen_sphere_lowerbound,
    gen_uniform,
    load_banana,
    load_csv,
    save_csv,
)
from .neighbors import build_neighbor_table, classify_batch
from .verify import audit_fcnn_representatives, audit_ne_charging, is_consistent, is_selective

EXIT_OK, EXIT_FAILED, EXIT_IO, EXIT_DATASET, EXIT_PROVENANCE, EXIT_DIMENSION = 0, 1, 2, 3, 4, 5

log = logging.getLogger("nncondense")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _add_dataset_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--input", type=Path, help="CSV file: coordinate columns then a label column")
    src.add_argument("--gen", choices=["circle", "mss-adversarial", "sphere", "uniform", "banana"])
    p.add_argument("--drop-conflicts", action="store_true", help="drop rows whose coordinates carry several labels")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--kappa", type=int, default=2)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--classes", type=int, default=2)


def load_dataset(args) -> TrainingSet:
    if args.input is not None:
        try:
            with open(args.input, "rb") as fh:
                return load_csv(fh, CsvOptions(drop_conflicts=args.drop_conflicts))
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc}", EXIT_IO) from None
    if args.gen == "circle":
        return gen_circle(args.n, args.seed)
    if args.gen == "mss-adversarial":
        return gen_mss_adversarial(args.eps, args.d)
    if args.gen == "sphere":
        return gen_sphere_lowerbound(args.kappa, args.m, args.d, args.separation, args.seed)
    if args.gen == "uniform":
        return gen_uniform(args.n, args.d, args.classes, args.seed)
    return load_banana()


def _read_subset(path: Path, P: TrainingSet) -> Subset:
    try:
        S = Subset.from_json(path.read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None
    except (ValueError, KeyError) as exc:
        raise CliError(f"malformed subset file {path}: {exc}", EXIT_DATASET) from None
    if S.source_size != P.n or (S.dataset_hash is not None and S.dataset_hash != P.content_hash()):
        raise CliError(f"{path} was not computed from this dataset", EXIT_PROVENANCE)
    return S


def _workers() -> int:
    try:
        cap = int(os.environ.get("NNC_THREADS", "0"))
    except ValueError:
        cap = 0
    default = min(len(CONDENSERS), os.cpu_count() or 1)
    return max(1, min(cap, default) if cap > 0 else default)


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def cmd_generate(args) -> int:
    P = load_dataset(args)
    if args.out is None:
        save_csv(P, sys.stdout)
    else:
        try:
            save_csv(P, args.out)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from None
    return EXIT_OK


def cmd_condense(args) -> int:
    P = load_dataset(args)
    P.require_condensable()
    out_dir = args.out_dir
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out_dir}: {exc}", EXIT_IO) from None
    algos = list(CONDENSERS) if args.algo == "all" else [Algorithm(args.algo)]
    table = build_neighbor_table(P)
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        subsets = list(pool.map(lambda a: condense(P, a, table), algos))

    rows = []
    for S in subsets:
        name = S.algorithm.value
        _write(out_dir / f"{name}.json", S.to_json() + "\n")
        _write(out_dir / f"{name}.csv", S.to_csv(P))
        rows.append((name.upper(), len(S), 100.0 * len(S) / P.n))
    print(f"{'algorithm':<10}{'|subset|':>10}{'% of n':>10}")
    for name, size, pct in rows:
        print(f"{name:<10}{size:>10}{pct:>9.2f}%")
    print(f"{'n':<10}{P.n:>10}")
    return EXIT_OK


def cmd_verify(args) -> int:
    P = load_dataset(args)
    S = _read_subset(args.subset, P)
    table = build_neighbor_table(P)
    reports = [is_consistent(P, S)]
    if S.algorithm in (Algorithm.MSS, Algorithm.RSS, Algorithm.VSS, Algorithm.NET):
        reports.append(is_selective(P, S, table))
    if S.algorithm is Algorithm.RSS:
        reports.append(audit_ne_charging(P, S, table))
    if S.algorithm is Algorithm.FCNN and S.trace is not None:
        reports.append(audit_fcnn_representatives(P, S))
    text = json.dumps([r.to_dict() for r in reports], indent=2)
    if args.out:
        _write(args.out, text + "\n")
    print(text)
    return EXIT_OK if all(r.holds for r in reports) else EXIT_FAILED


def _accuracy(Q, q_labels, R, P) -> float:
    return float(np.mean(classify_batch(Q, R, P) == q_labels))


def cmd_evaluate(args) -> int:
    P = load_dataset(args)
    if args.subset is not None:
        S = _read_subset(args.subset, P)
        train = P
        if args.queries is not None:
            try:
                with open(args.queries, "rb") as fh:
                    Qset = load_csv(fh)
            except OSError as exc:
                raise CliError(f"cannot read {args.queries}: {exc}", EXIT_IO) from None
            if Qset.dimension != P.dimension:
                raise CliError("query dimension differs from the training set", EXIT_DATASET)
            names = {name: i for i, name in enumerate(P.class_names)}
            Q = Qset.coords
            q_labels = np.array([names.get(Qset.class_names[l], -1) for l in Qset.labels])
        else:
            Q, q_labels = P.coords, P.labels
    else:
        if args.algo is None:
            raise CliError("evaluate needs --subset or --algo", EXIT_DATASET)
        rng = np.random.default_rng(args.split_seed)
        perm = rng.permutation(P.n)
        n_test = int(round(args.holdout * P.n))
        if not 0 < n_test < P.n:
            raise CliError("holdout fraction leaves an empty split", EXIT_DATASET)
        test, train_idx = np.sort(perm[:n_test]), np.sort(perm[n_test:])
        train = P.take(train_idx)
        train.require_condensable()
        S = condense(train, args.algo)
        names = {name: i for i, name in enumerate(train.class_names)}
        Q = P.coords[test]
        q_labels = np.array([names.get(P.class_names[l], -1) for l in P.labels[test]])

    report = {
        "algorithm": S.algorithm.value,
        "trainingSize": train.n,
        "subsetSize": len(S),
        "queries": int(len(Q)),
        "accuracySubset": _accuracy(Q, q_labels, S, train),
        "accuracyFull": _accuracy(Q, q_labels, np.arange(train.n), train),
    }
    text = json.dumps(report, indent=2)
    if args.out:
        _write(args.out, text + "\n")
    print(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = sorted(int(s) for s in args.sizes.split(","))
    algos = list(CONDENSERS) if args.algo == "all" else [Algorithm(args.algo)]
    records = []
    for a in algos:
        recs = bench.run_scaling(a, args.bench_gen, sizes, args.seed, args.repeats)
        records += recs
        if len(recs) > 1:
            print(f"{a.value}: log-log comparison slope {bench.loglog_slope(recs):.3f}", file=sys.stderr)
    text = bench.to_csv(records)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_plot(args) -> int:
    P = load_dataset(args)
    if P.dimension != 2:
        raise CliError(f"plots need 2-D data, got d={P.dimension}", EXIT_DIMENSION)
    S = _read_subset(args.subset, P) if args.subset is not None else None
    prefix = str(args.out_prefix)
    _write(Path(prefix + ".csv"), plot.plot_csv(P, S))
    _write(Path(prefix + ".svg"), plot.scatter_svg(P, S))
    return EXIT_OK


def cmd_table(args) -> int:
    P = load_dataset(args)
    text = build_neighbor_table(P).to_csv()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nnc", description="Nearest-neighbor condensation toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    algo_choices = [a.value for a in CONDENSERS] + ["all"]

    p = sub.add_parser("generate", help="write a generated dataset as CSV")
    _add_dataset_args(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("condense", help="run condensers and write subset artifacts")
    _add_dataset_args(p)
    p.add_argument("--algo", choices=algo_choices, default="all")
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=cmd_condense)

    p = sub.add_parser("verify", help="check a subset artifact against its dataset")
    _add_dataset_args(p)
    p.add_argument("--subset", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evaluate", help="1-NN accuracy of a subset versus the full set")
    _add_dataset_args(p)
    p.add_argument("--subset", type=Path)
    p.add_argument("--queries", type=Path, help="labeled query CSV (default: the training set)")
    p.add_argument("--algo", choices=[a.value for a in CONDENSERS], help="condense a training split instead")
    p.add_argument("--holdout", type=float, default=0.2)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="comparison-count scaling over dataset sizes")
    p.add_argument("--algo", choices=algo_choices, default="rss")
    p.add_argument("--bench-gen", default="circle", choices=["circle", "uniform"])
    p.add_argument("--sizes", default="1000,2000,4000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("plot", help="plot-ready CSV and SVG scatter of a 2-D dataset")
    _add_dataset_args(p)
    p.add_argument("--subset", type=Path)
    p.add_argument("--out-prefix", type=Path, default=Path("plot"))
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("table", help="dump the nearest-enemy table as CSV")
    _add_dataset_args(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"nnc: {exc}", file=sys.stderr)
        return exc.code
    except UnsupportedDimensionError as exc:
        print(f"nnc: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except InvalidInputError as exc:
        print(f"nnc: invalid dataset: {exc}", file=sys.stderr)
        return EXIT_DATASET


if __name__ == "__main__":
    sys.exit(main())
