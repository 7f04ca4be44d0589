"""Command-line interface: two-sample testing, simulation, benchmarking.

Result numbers go to stdout and are bit-reproducible for a given seed;
timing and warnings go to stderr.  Exit codes: 0 success, 2 usage/I-O/parse
error, 3 data-shape mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .bench import format_summary_table, load_config, run_experiment, \
    summarize, write_records
from .crosstest import cross_ed_test, cross_mmd_test
from .dataio import MeanShiftSpec, derive_seed, load_csv, sample_gaussian, \
    save_csv
from .errors import DataValidationError, DimensionMismatchError, PermstatError
from .matrices import median_heuristic_bandwidth
from .permute import (
    PermutationStream,
    efficient_perm_test,
    precomputed_perm_test,
    standard_perm_test,
)
from .stats import StatisticKind

_PERM_BACKENDS = {
    "standard": standard_perm_test,
    "precomputed": precomputed_perm_test,
    "efficient": efficient_perm_test,
}

DEFAULT_PERMUTATIONS = 200


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _resolve_threads(value) -> int:
    if value is None:
        value = os.environ.get("PERMSTAT_THREADS", "1")
    threads = int(value)
    if threads < 1:
        raise DataValidationError(f"threads must be >= 1, got {threads}")
    return threads


def _load_pair(x_path: str, y_path: str):
    x = load_csv(x_path)
    y = load_csv(y_path)
    if x.cols != y.cols:
        raise DimensionMismatchError(
            f"{x_path} has {x.cols} columns but {y_path} has {y.cols}")
    return x, y


def _print_report(fields: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(fields))
        return
    for key, value in fields.items():
        if isinstance(value, float):
            value = repr(value)
        elif isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        print(f"{key}: {value}")


def cmd_test(args) -> int:
    threads = _resolve_threads(args.threads)
    x, y = _load_pair(args.x_csv, args.y_csv)
    kind = StatisticKind(args.statistic)

    bandwidth = None
    if kind is StatisticKind.MMD_BIASED_SQUARED:
        if args.bandwidth in (None, "median"):
            bandwidth = median_heuristic_bandwidth(x, y)
        else:
            bandwidth = float(args.bandwidth)
    elif args.bandwidth is not None:
        _warn("--bandwidth only applies to the mmd statistic; ignored")

    t0 = time.perf_counter()
    if args.backend == "cross":
        if args.permutations is not None:
            _warn("--permutations is ignored by the cross backend")
        if args.null_out:
            _warn("--null-out is ignored by the cross backend "
                  "(no permutation null sample)")
        if kind is StatisticKind.ENERGY_DISTANCE:
            res = cross_ed_test(x, y)
            backend_name = "cross-ed"
        else:
            res = cross_mmd_test(x, y, bandwidth)
            backend_name = "cross-mmd"
        elapsed = time.perf_counter() - t0
        fields = {
            "backend": backend_name,
            "statistic": kind.value,
            "observed": res.u_hat,
            "z": res.z,
            "sigma": res.sigma_hat,
            "p_value": res.p_value,
            "split_sizes": list(res.split_sizes),
        }
    else:
        b = DEFAULT_PERMUTATIONS if args.permutations is None else args.permutations
        runner = _PERM_BACKENDS[args.backend]
        result = runner(x, y, b, PermutationStream(args.seed), kind=kind,
                        bandwidth=bandwidth, threads=threads)
        elapsed = time.perf_counter() - t0
        if args.null_out:
            with open(args.null_out, "w", encoding="utf-8") as fh:
                fh.write("null_statistic\n")
                for v in result.null_sample:
                    fh.write(format(v, ".17g") + "\n")
        fields = {
            "backend": args.backend,
            "statistic": kind.value,
            "observed": result.observed,
            "p_value": result.p_value,
            "permutations": result.b,
            "seed": args.seed,
        }
    _print_report(fields, args.json)
    print(f"elapsed_s: {elapsed:.6f}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    shift = MeanShiftSpec(p=args.p, j=args.j, epsilon=args.epsilon)
    x = sample_gaussian(args.n, args.p, seed=derive_seed(args.seed, 0))
    y = sample_gaussian(args.n, args.p, mean=shift,
                        seed=derive_seed(args.seed, 1))
    x_path, y_path = args.out
    save_csv(x, x_path)
    save_csv(y, y_path)
    print(f"wrote {x_path}: {args.n}x{args.p}, mean 0")
    print(f"wrote {y_path}: {args.n}x{args.p}, mean shift epsilon={args.epsilon!r} "
          f"on first {args.j} of {args.p} coordinates")
    return 0


def cmd_bench(args) -> int:
    threads = _resolve_threads(args.threads)
    config = load_config(args.config)
    records = run_experiment(config, threads=threads,
                             timing_isolated=args.timing_isolated)
    write_records(records, args.out)
    rows = summarize(records, config.alpha)
    print(format_summary_table(rows))
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permstat",
        description="Energy-distance and MMD two-sample tests with fast "
                    "permutation back-ends.")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run a two-sample test on two CSV files")
    t.add_argument("x_csv", help="first sample, rows = observations")
    t.add_argument("y_csv", help="second sample, same column count")
    t.add_argument("--statistic", choices=["ed", "mmd"], default="ed",
                   help="test statistic (default: ed)")
    t.add_argument("--backend",
                   choices=["standard", "precomputed", "efficient", "cross"],
                   default="efficient",
                   help="permutation back-end or the permutation-free cross "
                        "test (default: efficient)")
    t.add_argument("--permutations", type=int, metavar="B", default=None,
                   help=f"number of permutations (default: {DEFAULT_PERMUTATIONS};"
                        " ignored by --backend cross)")
    t.add_argument("--seed", type=int, default=0,
                   help="permutation stream seed (default: 0)")
    t.add_argument("--bandwidth", default=None, metavar="{median|SIGMA}",
                   help="Gaussian kernel bandwidth for mmd "
                        "(default: median heuristic)")
    t.add_argument("--null-out", metavar="PATH", default=None,
                   help="write the permutation null sample to a CSV file")
    t.add_argument("--json", action="store_true",
                   help="machine-readable report on stdout")
    t.add_argument("--threads", type=int, default=None,
                   help="worker thread cap (default: $PERMSTAT_THREADS or 1); "
                        "never changes results")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate",
                       help="write synthetic Gaussian two-sample CSV files")
    s.add_argument("--n", type=int, required=True, help="rows per sample")
    s.add_argument("--p", type=int, required=True, help="columns (variables)")
    s.add_argument("--j", type=int, default=0,
                   help="count of mean-shifted coordinates in y (default: 0)")
    s.add_argument("--epsilon", type=float, default=0.0,
                   help="mean shift applied to the first j coordinates of y")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", nargs=2, required=True,
                   metavar=("X_CSV", "Y_CSV"), help="output paths")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="run a benchmark/power experiment")
    b.add_argument("--config", required=True,
                   help="experiment config (JSON or TOML)")
    b.add_argument("--out", required=True,
                   help="records output (.csv, or .jsonl for JSON lines)")
    b.add_argument("--threads", type=int, default=None,
                   help="worker thread cap inside back-ends")
    b.add_argument("--timing-isolated", action="store_true",
                   help="force single-threaded execution so timed runs never "
                        "overlap")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (PermstatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
