import csv
import io

import numpy as np
import pytest

from dimkit.bench import CSV_HEADER, BenchRecord, records_to_csv, run_bench, sign_aligned_mismatch, threads_from_env
from dimkit.errors import InvalidParameter, OutOfMemoryGuard


def test_single_size_two_records():
    recs = run_bench([1000], repeats=1)
    assert [r.method for r in recs] == ["pca-cov", "pca-svd"]
    for r in recs:
        assert r.n == 1000 and r.p == 72 and r.d == 12 and r.threads == 1
        assert r.wall_time_seconds > 0 and 0 <= r.mismatch <= 1e-8


def test_empty_sizes():
    assert run_bench([]) == []


def test_ascending_order():
    recs = run_bench([600, 300], p=20, d=4, repeats=1)
    assert [(r.n, r.method) for r in recs] == [(300, "pca-cov"), (300, "pca-svd"), (600, "pca-cov"), (600, "pca-svd")]


def test_same_seed_same_data_mismatch():
    a = run_bench([400], p=20, d=4, repeats=1, seed=3)
    b = run_bench([400], p=20, d=4, repeats=1, seed=3)
    assert a[0].mismatch == b[0].mismatch


def test_memory_guard():
    with pytest.raises(OutOfMemoryGuard):
        run_bench([10**9])
    with pytest.raises(OutOfMemoryGuard):
        run_bench([1000], memory_cap=1000)


def test_bad_arguments():
    with pytest.raises(InvalidParameter):
        run_bench([10], d=12)
    with pytest.raises(InvalidParameter):
        run_bench([100], repeats=0)


def test_sign_aligned_mismatch():
    A = np.array([[1.0, 2.0], [3.0, -4.0]])
    assert sign_aligned_mismatch(A, A * [-1, 1]) == 0.0
    assert sign_aligned_mismatch(A, A + 0.5) == 0.5


def test_csv_format():
    recs = [BenchRecord("pca-cov", 10, 72, 12, 0.25, 1e-12, 1)]
    text = records_to_csv(recs)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER == ("method", "n", "p", "d", "wall_time_seconds", "mismatch", "threads")
    assert rows[1] == ["pca-cov", "10", "72", "12", "0.25", "1e-12", "1"]
    assert records_to_csv([]) == ",".join(CSV_HEADER) + "\n"


def test_threads_env(monkeypatch):
    monkeypatch.delenv("DIMKIT_THREADS", raising=False)
    assert threads_from_env(4) == 4
    monkeypatch.setenv("DIMKIT_THREADS", "2")
    assert threads_from_env() == 2
    monkeypatch.setenv("DIMKIT_THREADS", "0")
    with pytest.raises(InvalidParameter):
        threads_from_env()
