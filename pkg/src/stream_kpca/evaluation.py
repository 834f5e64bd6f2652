"""Error measures and the benchmark harness.

The two gram-error measures follow the normalization that makes them
comparable across data sets: spectral error ||G - G'||_2 / n (worst case)
and Frobenius error ||G - G'||_F / n^2 (global). The benchmark grid trains
each (method, config) cell on the data, times train and per-point test
work, reconstructs the cell's gram approximation, and scores it against
the exact gram oracle.

The exact oracle materializes an n x n matrix, so the harness refuses
n > 5000 by default; the STREAM_KPCA_ORACLE_MAX_N environment variable
overrides the guard.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import baselines, skpca
from .errors import ConfigurationError, ContractViolationError, NumericalFailureError
from .kernels import KernelSpec, gram
from .numerics import as_matrix, spectral_norm, sym_eig
from .rff import sample_feature_map
from .seeds import substream_seed

ORACLE_MAX_N_DEFAULT = 5000
ORACLE_MAX_N_ENV = "STREAM_KPCA_ORACLE_MAX_N"

METHODS = ("skpca", "rnca", "nystrom")

TIMING_REPS = 3


def oracle_max_n() -> int:
    raw = os.environ.get(ORACLE_MAX_N_ENV)
    if raw is None:
        return ORACLE_MAX_N_DEFAULT
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(
            f"{ORACLE_MAX_N_ENV} must be an integer, got {raw!r}"
        ) from None


def _check_pair(g, gp, symmetric: bool) -> tuple[np.ndarray, np.ndarray]:
    ga = as_matrix(g, "exact gram")
    gpa = as_matrix(gp, "approximate gram")
    if ga.shape != gpa.shape:
        raise ContractViolationError(f"shape mismatch: {ga.shape} vs {gpa.shape}")
    if ga.shape[0] != ga.shape[1]:
        raise ContractViolationError(f"gram matrices must be square, got {ga.shape}")
    if symmetric:
        for name, mat in (("exact gram", ga), ("approximate gram", gpa)):
            scale = max(float(np.linalg.norm(mat)), 1e-300)
            if float(np.linalg.norm(mat - mat.T)) > 1e-8 * scale:
                raise ContractViolationError(f"{name} is not symmetric within tolerance")
    return ga, gpa


def spectral_error(g, gp) -> float:
    """Worst-case error ||G - G'||_2 / n."""
    ga, gpa = _check_pair(g, gp, symmetric=True)
    n = ga.shape[0]
    return spectral_norm(ga - gpa) / n


def frobenius_error(g, gp) -> float:
    """Global error ||G - G'||_F / n^2."""
    ga, gpa = _check_pair(g, gp, symmetric=False)
    n = ga.shape[0]
    return float(np.linalg.norm(ga - gpa)) / n**2


def rank_k_frobenius_check(g, gp, k: int, spectral: float | None = None) -> tuple[float, float]:
    """Check ||G - G'_k||_F <= ||G - G_k||_F + ||G - G'||_2 * sqrt(k).

    Uses the measured spectral norm of the difference (pass `spectral` to
    reuse a value already computed), so the inequality is deterministic
    given that measurement. Returns (lhs, rhs) and raises
    NumericalFailureError if the inequality fails beyond 1e-6 * n slack.
    """
    ga, gpa = _check_pair(g, gp, symmetric=True)
    n = ga.shape[0]
    if not 1 <= k <= n:
        raise ContractViolationError(f"k must be in [1, {n}], got {k}")
    if spectral is None:
        spectral = spectral_norm(ga - gpa)
    wp, vp = sym_eig(gpa)
    vk = vp[:, :k]
    gp_k = (vk * wp[:k]) @ vk.T
    lhs = float(np.linalg.norm(ga - gp_k))
    wg = np.linalg.eigvalsh((ga + ga.T) / 2.0)[::-1]
    base = float(np.sqrt(max(np.sum(wg[k:] ** 2), 0.0)))
    rhs = base + spectral * math.sqrt(k)
    if lhs > rhs + 1e-6 * n:
        raise NumericalFailureError(
            f"rank-{k} Frobenius bound violated: lhs={lhs:.6e} > rhs={rhs:.6e}"
        )
    return lhs, rhs


@dataclass(frozen=True)
class BenchmarkCell:
    """One (method, config) grid cell.

    skpca needs (m, ell); rnca needs m (k optional, defaults to m);
    nystrom needs c (k optional, defaults to c).
    """

    method: str
    m: int | None = None
    ell: int | None = None
    c: int | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigurationError(
                f"unknown method {self.method!r}; expected one of {METHODS}"
            )
        if self.method == "skpca" and (self.m is None or self.ell is None):
            raise ConfigurationError("skpca cells need m and ell")
        if self.method == "rnca" and self.m is None:
            raise ConfigurationError("rnca cells need m")
        if self.method == "nystrom" and self.c is None:
            raise ConfigurationError("nystrom cells need c")

    @property
    def sample_size(self) -> int:
        return self.c if self.method == "nystrom" else self.m


@dataclass
class ErrorReport:
    """Scores and provenance for one benchmark cell."""

    method: str
    sample_size: int
    space_entries: int
    spectral_err: float
    frobenius_err: float
    rank_k_frobenius: float | None
    train_seconds: float
    test_seconds: float
    seed: int
    n: int
    d: int
    eps: float | None
    delta: float | None
    k: int | None
    sigma: float
    m: int | None
    ell: int | None
    c: int | None


REPORT_COLUMNS = [
    "method",
    "n",
    "d",
    "sigma",
    "seed",
    "eps",
    "delta",
    "sample_size",
    "m",
    "ell",
    "c",
    "k",
    "space_entries",
    "spectral_err",
    "frobenius_err",
    "rank_k_frobenius",
    "train_seconds",
    "test_seconds",
]

# wall-clock fields are the only nondeterministic report columns
TIMING_COLUMNS = ("train_seconds", "test_seconds")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_reports_csv(reports: Sequence[ErrorReport], path) -> None:
    lines = [",".join(REPORT_COLUMNS)]
    for rep in reports:
        lines.append(",".join(_fmt(getattr(rep, col)) for col in REPORT_COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_reports_jsonl(reports: Sequence[ErrorReport], path) -> None:
    import json

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rep in reports:
            record = {col: getattr(rep, col) for col in REPORT_COLUMNS}
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_reports_csv(path) -> list[dict]:
    import csv

    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _median_time(fn: Callable[[], object], reps: int) -> tuple[float, object]:
    times = []
    result = None
    for _ in range(reps):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    times.sort()
    return times[len(times) // 2], result


def _run_cell(
    cell: BenchmarkCell,
    data: np.ndarray,
    test_set: np.ndarray,
    g_exact: np.ndarray,
    k: int | None,
    kernel: KernelSpec,
    cell_seed: int,
    timing_reps: int,
) -> ErrorReport:
    n, d = data.shape

    if cell.method == "skpca":
        config = skpca.SkpcaConfig(kernel=kernel, seed=cell_seed, m=cell.m, ell=cell.ell)
        train_seconds, model = _median_time(lambda: skpca.train(config, data), timing_reps)
        k_test = min(k, cell.ell) if k is not None else cell.ell

        def test_pass():
            for row in test_set:
                model.project_test(row, k_test)

        gp = model.reconstruct_gram(data)
        space = skpca.space_entries(cell.m, cell.ell, d)
    elif cell.method == "rnca":
        fm = sample_feature_map(kernel, cell.m, d, cell_seed)
        train_seconds, model = _median_time(lambda: baselines.rnca_train(fm, data), timing_reps)
        k_test = min(k, cell.m) if k is not None else cell.m

        def test_pass():
            for row in test_set:
                model.test(row, k_test)

        gp = model.reconstruct(data, k=cell.k)
        space = baselines.rnca_space_entries(cell.m, d)
    else:
        k_model = cell.k if cell.k is not None else cell.c
        train_seconds, model = _median_time(
            lambda: baselines.nystrom_train(kernel, cell.c, k_model, cell_seed, data),
            timing_reps,
        )

        def test_pass():
            for row in test_set:
                model.test(row)

        gp = model.reconstruct(data)
        space = baselines.nystrom_space_entries(cell.c, d)

    test_seconds, _ = _median_time(test_pass, timing_reps)

    spec_err = spectral_error(g_exact, gp)
    frob_err = frobenius_error(g_exact, gp)
    rank_k = None
    if k is not None and 1 <= k <= n:
        lhs, _ = rank_k_frobenius_check(g_exact, gp, k, spectral=spec_err * n)
        rank_k = lhs / n**2

    return ErrorReport(
        method=cell.method,
        sample_size=cell.sample_size,
        space_entries=space,
        spectral_err=spec_err,
        frobenius_err=frob_err,
        rank_k_frobenius=rank_k,
        train_seconds=train_seconds,
        test_seconds=test_seconds,
        seed=cell_seed,
        n=n,
        d=d,
        eps=None,
        delta=None,
        k=k,
        sigma=kernel.sigma,
        m=cell.m,
        ell=cell.ell,
        c=cell.c,
    )


def run_benchmark(
    grid: Sequence[BenchmarkCell],
    data,
    test_set,
    k: int | None = None,
    *,
    kernel: KernelSpec | None = None,
    seed: int = 0,
    jobs: int = 1,
    timing_reps: int = TIMING_REPS,
) -> list[ErrorReport]:
    """Score every grid cell against the exact gram oracle.

    Each cell owns an RNG stream derived from (seed, cell index), so the
    grid is reproducible cell-by-cell regardless of execution order; cells
    are independent and fan out over `jobs` worker threads with an
    order-preserving merge.
    """
    if not grid:
        return []
    kernel = kernel if kernel is not None else KernelSpec()
    arr = as_matrix(data, "data matrix")
    tst = as_matrix(test_set, "test set")
    if tst.shape[1] != arr.shape[1]:
        raise ContractViolationError(
            f"test set has {tst.shape[1]} columns, data has {arr.shape[1]}"
        )
    n = arr.shape[0]
    guard = oracle_max_n()
    if n > guard:
        raise ConfigurationError(
            f"n={n} exceeds the exact-oracle guard ({guard}); use a smaller n "
            f"or raise {ORACLE_MAX_N_ENV}"
        )
    g_exact = gram(kernel, arr)

    def job(item):
        idx, cell = item
        cell_seed = substream_seed(seed, "benchmark_cell", idx)
        return _run_cell(cell, arr, tst, g_exact, k, kernel, cell_seed, timing_reps)

    items = list(enumerate(grid))
    if jobs <= 1:
        return [job(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(job, items))
