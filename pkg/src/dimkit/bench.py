"""PCA runtime harness: covariance eigendecomposition versus SVD."""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import astuple, dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import InvalidParameter, OutOfMemoryGuard
from .generate import generate
from .reduce import pca, pca_svd

CSV_HEADER = ("method", "n", "p", "d", "wall_time_seconds", "mismatch", "threads")
DEFAULT_MEMORY_CAP = 4 * 2**30
BENCH_NOISE = 0.01


@dataclass(frozen=True)
class BenchRecord:
    method: str
    n: int
    p: int
    d: int
    wall_time_seconds: float
    mismatch: float
    threads: int


def sign_aligned_mismatch(A, B) -> float:
    """Max entrywise deviation after flipping each column of B to best match A."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    signs = np.where(np.sum(A * B, axis=0) < 0, -1.0, 1.0)
    return float(np.max(np.abs(A - B * signs), initial=0.0))


def estimated_bytes(n: int, p: int, d: int) -> int:
    # data, centered copy, SVD factor U, plus two embeddings
    return 8 * (3 * n * p + 2 * n * d + 4 * p * p)


def _median_time(fn, X, d, repeats):
    times, out = [], None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(X, d)
        times.append(time.perf_counter() - t0)
    # guard against clocks too coarse to see a tiny run
    return max(float(np.median(times)), 1e-9), out


def run_bench(sizes, p=72, d=12, repeats=3, seed=0, threads=1, memory_cap=DEFAULT_MEMORY_CAP) -> list[BenchRecord]:
    """Time both PCA paths on lowrank data for each sample count in ``sizes``.

    Data: standard normal in a fixed ``min(12, p)``-dimensional subspace of
    R^p plus isotropic noise of standard deviation 0.01. Returns records in
    ascending ``n``, covariance path first; each record carries the median
    wall time over ``repeats`` runs and the sign-aligned embedding mismatch.
    """
    sizes = sorted(int(s) for s in sizes)
    if repeats < 1:
        raise InvalidParameter(f"repeats must be >= 1, got {repeats}")
    if threads is None or threads < 1:
        raise InvalidParameter(f"threads must be a positive integer, got {threads!r}")
    for n in sizes:
        if n < 2 * d:
            raise InvalidParameter(f"each n must be at least 2*d = {2 * d}, got {n}")
        need = estimated_bytes(n, p, d)
        if need > memory_cap:
            raise OutOfMemoryGuard(
                f"n={n}, p={p} needs about {need / 2**30:.2f} GiB, cap is {memory_cap / 2**30:.2f} GiB"
            )
    records = []
    with threadpool_limits(limits=threads):
        for n in sizes:
            X, _ = generate("lowrank", n, noise=BENCH_NOISE, seed=seed, intrinsic=min(12, p), ambient=p)
            t_cov, r_cov = _median_time(pca, X, d, repeats)
            t_svd, r_svd = _median_time(pca_svd, X, d, repeats)
            mismatch = sign_aligned_mismatch(r_cov.embedding, r_svd.embedding)
            records.append(BenchRecord("pca-cov", n, p, d, t_cov, mismatch, threads))
            records.append(BenchRecord("pca-svd", n, p, d, t_svd, mismatch, threads))
    return records


def threads_from_env(default=None):
    """Thread cap from ``DIMKIT_THREADS``; ``default`` when unset."""
    raw = os.environ.get("DIMKIT_THREADS")
    if raw is None or raw == "":
        return default
    try:
        val = int(raw)
    except ValueError:
        val = 0
    if val < 1:
        raise InvalidParameter(f"DIMKIT_THREADS must be a positive integer, got {raw!r}")
    return val


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        row = list(astuple(r))
        row[4] = repr(float(row[4]))
        row[5] = repr(float(row[5]))
        w.writerow(row)
    return buf.getvalue()
