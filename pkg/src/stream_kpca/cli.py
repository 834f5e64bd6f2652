"""Command-line front end: data generation, training, testing, benchmarks.

Every command is deterministic given its flags and --seed (wall-clock
output aside); all randomness flows through named sub-streams derived from
the single seed.
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import sys
import time

import numpy as np

from . import baselines, evaluation, skpca
from .dataio import count_csv_rows, iter_csv_rows, read_matrix_csv, write_matrix_csv
from .errors import ConfigurationError, ContractViolationError, NumericalFailureError
from .kernels import KernelSpec
from .persist import load_model, save_model
from .rff import sample_feature_map
from .seeds import substream_seed
from .skpca import SkpcaConfig, SkpcaModel, derive_feature_count, derive_sketch_size
from .baselines import NystromModel, RncaModel
from .synthetic import SyntheticSpec, gen_random_noisy

METHODS = ("skpca", "rnca", "nystrom")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stream-kpca",
        description="Streaming kernel PCA, baselines, and benchmarks over CSV data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    g = sub.add_parser(
        "gen-data",
        help="generate a synthetic low-rank-plus-noise dataset",
        formatter_class=fmt,
    )
    g.add_argument("--output", required=True, help="destination CSV path")
    g.add_argument("--n", type=int, required=True, help="number of points")
    g.add_argument("--d", type=int, required=True, help="ambient dimension")
    g.add_argument("--s", type=int, default=50, help="signal dimension (< d)")
    g.add_argument("--zeta", type=float, default=10.0, help="noise divisor")
    g.add_argument("--seed", type=int, default=0, help="master RNG seed")
    g.add_argument("--header", action="store_true", help="write a c0..c{d-1} header row")

    t = sub.add_parser("train", help="train a model from a CSV stream", formatter_class=fmt)
    t.add_argument("--input", required=True, help="training CSV path")
    t.add_argument("--output", required=True, help="model file to write")
    t.add_argument("--method", choices=METHODS, default="skpca", help="training method")
    t.add_argument("--m", type=int, default=None, help="feature count (skpca/rnca)")
    t.add_argument("--ell", type=int, default=None, help="sketch size (skpca)")
    t.add_argument("--c", type=int, default=None, help="sample count (nystrom)")
    t.add_argument("--k", type=int, default=None, help="rank (nystrom; defaults to c)")
    t.add_argument("--sigma", type=float, default=1.0, help="kernel bandwidth")
    t.add_argument("--eps", type=float, default=None, help="error parameter in (0,1)")
    t.add_argument("--delta", type=float, default=None, help="failure probability in (0,1)")
    t.add_argument("--seed", type=int, default=0, help="master RNG seed")
    t.add_argument("--header", action="store_true", help="input has a header row")
    t.add_argument("--drop-first-col", action="store_true", help="skip a leading label column")
    t.add_argument(
        "--center",
        action="store_true",
        help="subtract the column means (costs an extra pass over the input)",
    )

    s = sub.add_parser("test", help="project test points through a model", formatter_class=fmt)
    s.add_argument("--model", required=True, help="model file from train")
    s.add_argument("--input", required=True, help="test CSV path")
    s.add_argument("--output", required=True, help="loadings CSV to write")
    s.add_argument("--k", type=int, default=None, help="number of loading coordinates")
    s.add_argument("--header", action="store_true", help="input has a header row")
    s.add_argument("--drop-first-col", action="store_true", help="skip a leading label column")

    b = sub.add_parser(
        "benchmark",
        help="run a (method x sample-size) grid against the exact gram oracle",
        formatter_class=fmt,
    )
    b.add_argument("--input", required=True, help="data CSV path")
    b.add_argument("--output", required=True, help="report CSV to write")
    b.add_argument("--method", default="skpca,rnca,nystrom", help="comma-separated methods")
    b.add_argument("--m", default="64,128", help="comma-separated sample sizes")
    b.add_argument("--ell", default="10", help="comma-separated sketch sizes (skpca)")
    b.add_argument("--c", default=None, help="comma-separated nystrom sizes (default: --m)")
    b.add_argument("--k", type=int, default=None, help="rank for rank-k error column")
    b.add_argument("--sigma", type=float, default=1.0, help="kernel bandwidth")
    b.add_argument("--seed", type=int, default=0, help="master RNG seed")
    b.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker threads")
    b.add_argument("--header", action="store_true", help="input has a header row")
    b.add_argument("--drop-first-col", action="store_true", help="skip a leading label column")
    b.add_argument("--center", action="store_true", help="subtract column means before the run")
    return parser


def cmd_gen_data(args) -> int:
    spec = SyntheticSpec(
        n=args.n,
        d=args.d,
        s=args.s,
        zeta=args.zeta,
        seed=substream_seed(args.seed, "data_gen"),
    )
    data = gen_random_noisy(spec)
    write_matrix_csv(args.output, data, header=args.header)
    print(f"wrote {args.n} x {args.d} synthetic points to {args.output}")
    return 0


def _input_rows(args):
    return iter_csv_rows(
        args.input, drop_first_col=args.drop_first_col, header=args.header
    )


def _mean_pass(args) -> tuple[np.ndarray, int]:
    total = None
    count = 0
    for row in _input_rows(args):
        total = row.copy() if total is None else total + row
        count += 1
    if count == 0:
        raise ContractViolationError(f"{args.input}: no data rows")
    return total / count, count


def _centered(rows, center):
    for row in rows:
        yield row - center


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigurationError(message)


def cmd_train(args) -> int:
    kernel = KernelSpec(sigma=args.sigma)
    eps_mode = args.eps is not None or args.delta is not None
    if eps_mode:
        _require(
            args.eps is not None and args.delta is not None,
            "--eps and --delta must be given together",
        )

    center = None
    n_known = None
    if args.center:
        center, n_known = _mean_pass(args)
    elif eps_mode:
        # the (eps, delta) bounds depend on n: one extra counting pass
        n_known = count_csv_rows(args.input, header=args.header)
        _require(n_known > 0, f"{args.input}: no data rows")

    def rows():
        base = _input_rows(args)
        return _centered(base, center) if center is not None else base

    fm_seed = substream_seed(args.seed, "feature_map")
    start = time.perf_counter()

    if args.method == "skpca":
        _require(args.c is None and args.k is None, "--c/--k do not apply to skpca")
        m, ell = args.m, args.ell
        if eps_mode:
            derived_m = derive_feature_count(args.eps, args.delta, n_known)
            derived_ell = derive_sketch_size(args.eps)
            _require(m is None or m == derived_m, f"--m conflicts with derived m={derived_m}")
            _require(
                ell is None or ell == derived_ell,
                f"--ell conflicts with derived ell={derived_ell}",
            )
            m, ell = derived_m, derived_ell
        _require(m is not None and ell is not None, "skpca needs --m and --ell (or --eps/--delta)")
        config = SkpcaConfig(kernel=kernel, seed=fm_seed, m=m, ell=ell)
        model = skpca.train(config, rows())
        elapsed = time.perf_counter() - start
        save_model(model, args.output, center=center)
        print(
            f"trained method=skpca n={model.n_seen} d={model.fm.d} m={m} ell={ell} "
            f"seconds={elapsed:.6f} "
            f"space_entries={skpca.space_entries(m, ell, model.fm.d)}"
        )
    elif args.method == "rnca":
        _require(
            args.ell is None and args.c is None and args.k is None,
            "--ell/--c/--k do not apply to rnca training (pass --k to test instead)",
        )
        m = args.m
        if eps_mode:
            derived_m = derive_feature_count(args.eps, args.delta, n_known)
            _require(m is None or m == derived_m, f"--m conflicts with derived m={derived_m}")
            m = derived_m
        _require(m is not None, "rnca needs --m (or --eps/--delta)")
        iterator = rows()
        first = next(iter(iterator), None)
        if first is None:
            raise ContractViolationError(f"{args.input}: no data rows")
        fm = sample_feature_map(kernel, m, first.size, fm_seed)
        model = baselines.rnca_train(fm, itertools.chain([first], iterator))
        elapsed = time.perf_counter() - start
        save_model(model, args.output, center=center)
        print(
            f"trained method=rnca n={model.n_seen} d={fm.d} m={m} "
            f"seconds={elapsed:.6f} "
            f"space_entries={baselines.rnca_space_entries(m, fm.d)}"
        )
    else:
        _require(args.m is None and args.ell is None, "--m/--ell do not apply to nystrom")
        c = args.c
        if eps_mode:
            derived_c = math.ceil(math.log(2.0 * n_known / args.delta) / args.eps**2)
            _require(c is None or c == derived_c, f"--c conflicts with derived c={derived_c}")
            c = derived_c
        _require(c is not None, "nystrom needs --c (or --eps/--delta)")
        k = args.k if args.k is not None else c
        model = baselines.nystrom_train(
            kernel, c, k, substream_seed(args.seed, "reservoir"), rows()
        )
        elapsed = time.perf_counter() - start
        save_model(model, args.output, center=center)
        d = model.samples.shape[1]
        print(
            f"trained method=nystrom n={model.n_seen} d={d} c={c} k={k} "
            f"seconds={elapsed:.6f} "
            f"space_entries={baselines.nystrom_space_entries(c, d)}"
        )
    return 0


def cmd_test(args) -> int:
    model, center = load_model(args.model)
    if isinstance(model, SkpcaModel):
        d = model.fm.d
        k = args.k if args.k is not None else model.ell

        def project(x):
            _, loading, residual = model.project_test(x, k)
            return loading, residual

    elif isinstance(model, RncaModel):
        d = model.fm.d
        k = args.k if args.k is not None else model.m

        def project(x):
            _, loading, residual = model.test(x, k)
            return loading, residual

    elif isinstance(model, NystromModel):
        d = model.samples.shape[1]
        if args.k is not None and args.k != model.k:
            raise ConfigurationError(
                f"nystrom rank is fixed at train time (k={model.k}); retrain to change it"
            )
        k = model.k

        def project(x):
            c_row, loading = model.test(x)
            return loading, model.residual(c_row)

    else:  # pragma: no cover - load_model only returns the above
        raise ContractViolationError(f"unsupported model type {type(model)!r}")

    results = []
    count = 0
    start = time.perf_counter()
    for i, row in enumerate(
        iter_csv_rows(args.input, drop_first_col=args.drop_first_col, header=args.header)
    ):
        if row.size != d:
            raise ContractViolationError(
                f"{args.input}: row {i} has dimension {row.size}, model expects {d}"
            )
        if center is not None:
            row = row - center
        loading, residual = project(row)
        results.append((loading, residual))
        count += 1
    elapsed = time.perf_counter() - start
    if count == 0:
        raise ContractViolationError(f"{args.input}: no data rows")

    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        for loading, residual in results:
            fields = [format(v, ".17g") for v in loading]
            fields.append(format(residual, ".17g"))
            fh.write(",".join(fields) + "\n")
    print(
        f"tested n={count} k={k} total_seconds={elapsed:.6f} "
        f"per_point_seconds={elapsed / count:.9f}"
    )
    return 0


def _parse_int_list(raw: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"{flag} expects comma-separated integers, got {raw!r}") from None
    if not values:
        raise ConfigurationError(f"{flag} lists no values")
    return values


def cmd_benchmark(args) -> int:
    methods = [part.strip() for part in args.method.split(",") if part.strip()]
    for method in methods:
        if method not in METHODS:
            raise ConfigurationError(f"unknown method {method!r}; expected one of {METHODS}")
    sizes = _parse_int_list(args.m, "--m")
    ells = _parse_int_list(args.ell, "--ell")
    rounded = []
    even_ells = []
    for ell in ells:
        if ell % 2 != 0:
            rounded.append((ell, ell + 1))
            ell += 1
        even_ells.append(ell)
    csizes = _parse_int_list(args.c, "--c") if args.c is not None else sizes

    data = read_matrix_csv(args.input, drop_first_col=args.drop_first_col, header=args.header)
    if args.center:
        data = data - data.mean(axis=0)
    n = data.shape[0]
    _require(n >= 2, "benchmark needs at least 2 rows")
    rng = np.random.default_rng(substream_seed(args.seed, "test_split"))
    test_size = min(1000, max(1, n // 5))
    perm = rng.permutation(n)
    test_set = data[perm[:test_size]]
    train_set = data[perm[test_size:]]

    grid = []
    for method in methods:
        if method == "skpca":
            for size in sizes:
                for ell in even_ells:
                    _require(ell <= size, f"skpca needs ell <= m, got ell={ell}, m={size}")
                    grid.append(evaluation.BenchmarkCell(method="skpca", m=size, ell=ell))
        elif method == "rnca":
            for size in sizes:
                grid.append(evaluation.BenchmarkCell(method="rnca", m=size))
        else:
            for size in csizes:
                grid.append(evaluation.BenchmarkCell(method="nystrom", c=size))

    kernel = KernelSpec(sigma=args.sigma)
    reports = evaluation.run_benchmark(
        grid,
        train_set,
        test_set,
        k=args.k,
        kernel=kernel,
        seed=args.seed,
        jobs=args.jobs,
    )
    evaluation.write_reports_csv(reports, args.output)
    for old, new in rounded:
        print(f"note: odd sketch size ell={old} rounded up to {new}")
    print(
        f"benchmarked {len(reports)} cells on n={train_set.shape[0]} train / "
        f"{test_set.shape[0]} test points; report at {args.output}"
    )
    return 0


COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "test": cmd_test,
    "benchmark": cmd_benchmark,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command]
    try:
        return handler(args)
    except (ContractViolationError, ConfigurationError, NumericalFailureError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: OSError: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
