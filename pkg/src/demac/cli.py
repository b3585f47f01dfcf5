"""Command-line front end: synth, solve, bench, diag subcommands.

Exit codes: 0 on success (including solves that stop at the iteration
cap), 2 on usage errors, 3 on I/O errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .bench import nmse, parse_config, run_experiment
from .diag import incoherence, write_reports_csv
from .hankel import LevelShape
from .model import (
    GaussianNoise,
    SampleSet,
    SparseNoise,
    Subsample,
    corrupt,
    random_params,
    read_params_csv,
    read_sample_csv,
    synthesize,
    write_params_csv,
    write_signal_csv,
)
from .retrieve import DegenerateRankError, distance_to_torus, estimate_poles, freq_error, write_poles_csv
from .solve import Bounded, Exact, Robust, SolveOptions, demac, iht

SOLVE_HEADER = "method,model,n,m,k,eta,lambda,nmse,freq_rmse,circle_dist,iters,converged,wall_ms"


def _dims_from_args(args, parser):
    if getattr(args, "dims", None):
        try:
            return tuple(int(v) for v in args.dims.split("x"))
        except ValueError:
            parser.error(f"bad --dims {args.dims!r}, expected like 11x11")
    if getattr(args, "n", None):
        return (args.n,)
    parser.error("one of --n or --dims is required")


def _shape_from_args(args, dims):
    if getattr(args, "n1", None):
        n1s = tuple(int(v) for v in str(args.n1).split("x"))
        if len(n1s) == 1 and len(dims) > 1:
            n1s = n1s * len(dims)
        return LevelShape.from_splits(dims, n1s)
    return LevelShape.for_dims(dims, args.split)


def _fmt(v):
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def cmd_synth(args, parser):
    dims = _dims_from_args(args, parser)
    params = random_params(
        args.k, dims, min_sep=args.min_sep, seed=args.seed, exact_pair=args.exact_pair
    )
    signal = synthesize(params, dims)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_params_csv(out / "params.csv", params)
    write_signal_csv(out / "signal.csv", signal)
    print(f"wrote {out / 'params.csv'} and {out / 'signal.csv'}")
    return 0


def _build_mode(args, parser):
    if args.method == "noisy-demac":
        if args.eta is None:
            parser.error("--eta is required with method noisy-demac")
        return Bounded(args.eta)
    if args.method == "robust-demac":
        lam = args.lam if args.lam is not None else "auto"
        if lam != "auto":
            lam = float(lam)
        return Robust(lam)
    if args.eta is not None:
        parser.error("--eta only applies to method noisy-demac")
    if args.lam is not None:
        parser.error("--lambda only applies to method robust-demac")
    return Exact()


def cmd_solve(args, parser):
    dims = _dims_from_args(args, parser)
    shape = _shape_from_args(args, dims)
    if args.method == "iht" and args.k is None:
        parser.error("--k is required with method iht")
    mode = _build_mode(args, parser) if args.method != "iht" else None
    truth = None
    params = None
    if args.input:
        samples = read_sample_csv(args.input, dims)
        if args.truth:
            params = read_params_csv(args.truth)
            truth = synthesize(params, dims)
    else:
        if args.k is None:
            parser.error("--k is required when generating the instance inline")
        params = random_params(args.k, dims, min_sep=args.min_sep, seed=args.seed)
        truth = synthesize(params, dims)
        steps = []
        n = int(np.prod(dims))
        if args.m is not None and args.m < n:
            steps.append(Subsample(args.m))
        if args.eta is not None:
            steps.append(GaussianNoise(eta=args.eta))
        elif args.snr is not None:
            steps.append(GaussianNoise(snr_db=args.snr))
        if args.outliers:
            steps.append(SparseNoise(count=args.outliers))
        samples = corrupt(truth, steps, seed=args.seed + 1) if steps else SampleSet.full(truth)
    opts = SolveOptions(model=args.model, shape=shape, tol_rel=args.tol, max_iters=args.max_iters)
    t0 = time.perf_counter()
    if args.method == "iht":
        report = iht(samples, args.k, opts)
    else:
        report = demac(samples, mode, opts)
    wall_ms = (time.perf_counter() - t0) * 1e3
    err = nmse(report.y_hat, truth) if truth is not None else None
    est = None
    f_rmse = None
    c_dist = None
    if args.k is not None:
        try:
            est = estimate_poles(report.y_hat, args.k, shape, model=args.model)
            c_dist = distance_to_torus(est)
            if params is not None and params.k == args.k:
                f_rmse = freq_error(params, est)
        except (DegenerateRankError, ValueError):
            pass
    lam_used = None
    if isinstance(mode, Robust):
        lam_used = (
            1.0 / np.sqrt(samples.m * np.log(samples.n)) if mode.lam == "auto" else mode.lam
        )
    row = (
        args.method,
        args.model,
        samples.n,
        samples.m,
        args.k,
        args.eta,
        lam_used,
        err,
        f_rmse,
        c_dist,
        report.iters,
        report.converged,
        wall_ms,
    )
    print(SOLVE_HEADER)
    print(",".join(_fmt(v) for v in row))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_signal_csv(out / "recovered.csv", report.y_hat)
        if est is not None:
            write_poles_csv(out / "poles.csv", est)
    return 0


def cmd_bench(args, parser):
    config = parse_config(args.config, overrides=args.set or [])
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    trials_path, agg_path = run_experiment(config, args.out, threads=args.threads)
    print(f"wrote {trials_path} and {agg_path}")
    return 0


def cmd_diag(args, parser):
    dims = _dims_from_args(args, parser)
    shape = _shape_from_args(args, dims)
    if args.params:
        params = read_params_csv(args.params)
    else:
        if args.k is None:
            parser.error("--k is required without --params")
        params = random_params(args.k, dims, min_sep=args.min_sep, seed=args.seed)
    report = incoherence(params, shape)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_reports_csv(out / "incoherence.csv", [report])
        print(f"wrote {out / 'incoherence.csv'}")
    else:
        print("k,n,lambda_min_g1,lambda_min_g2,lambda_min_g2prime,mu1,c_s,sample_bound_c1")
        print(
            f"{report.k},{report.n},{report.lambda_min_g1!r},{report.lambda_min_g2!r},"
            f"{report.lambda_min_g2prime!r},{report.mu1!r},{report.c_s!r},{report.sample_bound()!r}"
        )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="demac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_k=True):
        p.add_argument("--n", type=int, help="1-D grid size")
        p.add_argument("--dims", type=str, help="grid sizes like 11x11 for d >= 2")
        p.add_argument("--n1", type=str, help="first Hankel block size(s), like 33 or 6x6")
        p.add_argument("--split", type=float, default=0.6, help="first-block fraction of N+1")
        p.add_argument("--seed", type=int, default=0)
        if with_k:
            p.add_argument("--k", type=int, help="model order")
            p.add_argument("--min-sep", type=float, default=0.0, help="wrap-around separation")

    p_synth = sub.add_parser("synth", help="generate a random instance and write CSVs")
    add_common(p_synth)
    p_synth.add_argument("--exact-pair", action="store_true")
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_solve = sub.add_parser("solve", help="solve one instance")
    add_common(p_solve)
    p_solve.add_argument(
        "--method", required=True, choices=("iht", "demac", "noisy-demac", "robust-demac")
    )
    p_solve.add_argument(
        "--model", default="double-hankel", choices=("double-hankel", "single-hankel")
    )
    p_solve.add_argument("--m", type=int, help="observed sample count")
    p_solve.add_argument("--eta", type=float, help="l2 noise budget (noisy-demac)")
    p_solve.add_argument("--snr", type=float, help="noise level in dB for inline instances")
    p_solve.add_argument("--outliers", type=int, default=0, help="sparse corruption count")
    p_solve.add_argument("--lambda", dest="lam", help="outlier penalty or 'auto'")
    p_solve.add_argument("--input", help="observed-samples CSV (index,re,im)")
    p_solve.add_argument("--truth", help="ground-truth params CSV for error reporting")
    p_solve.add_argument("--tol", type=float, help="relative stopping tolerance")
    p_solve.add_argument("--max-iters", type=int)
    p_solve.add_argument("--out", help="directory for recovered signal / pole CSVs")
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="run a Monte-Carlo campaign")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--seed", type=int, help="override the config seed")
    p_bench.add_argument("--threads", type=int, default=1)
    p_bench.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")
    p_bench.set_defaults(func=cmd_bench)

    p_diag = sub.add_parser("diag", help="incoherence report for an instance")
    add_common(p_diag)
    p_diag.add_argument("--params", help="params CSV instead of a random draw")
    p_diag.add_argument("--out", help="directory for the report CSV")
    p_diag.set_defaults(func=cmd_diag)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except OSError as exc:
        print(f"demac: i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
