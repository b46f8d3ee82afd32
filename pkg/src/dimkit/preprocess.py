"""Column-wise preprocessing with reusable records.

Kinds
-----
none
    identity.
center
    subtract column means.
scale
    divide by the column sample standard deviation (n - 1), no centering.
cscale
    center, then scale.
decorrelate
    center, then rotate onto the covariance eigenvectors (descending).
whiten
    decorrelate, then divide each rotated column by the square root of its
    eigenvalue.
"""

import numpy as np
from scipy import linalg

from ._linalg import fix_signs
from .core import PREPROCESS_KINDS, PreprocessRecord, validate
from .errors import InvalidParameter, RankDeficient, ZeroVariance

RANK_TOL = 1e-12


def sample_cov(X):
    """Sample covariance with denominator n - 1."""
    Xc = X - X.mean(axis=0)
    return Xc.T @ Xc / (X.shape[0] - 1)


def _column_std(X):
    sd = X.std(axis=0, ddof=1)
    scale = np.maximum(np.abs(X).max(axis=0), 1.0)
    flat = np.flatnonzero(sd <= 1e-14 * scale)
    if flat.size:
        raise ZeroVariance(f"column(s) {flat.tolist()} have zero variance")
    return sd


def fit(data, kind="center") -> PreprocessRecord:
    """Compute the preprocessing record for ``data`` without transforming it."""
    X = validate(data)
    if kind not in PREPROCESS_KINDS:
        raise InvalidParameter(f"unknown preprocessing kind {kind!r}; choose from {PREPROCESS_KINDS}")
    n, p = X.shape
    means = np.zeros(p)
    scales = np.ones(p)
    rotation = np.eye(p)
    if kind in ("center", "cscale", "decorrelate", "whiten"):
        means = X.mean(axis=0)
    if kind in ("scale", "cscale"):
        scales = _column_std(X)
    if kind in ("decorrelate", "whiten"):
        if kind == "whiten":
            _column_std(X)
        # covariance eigenpairs from the SVD of the centered data: same basis,
        # better accuracy for small eigenvalues
        _, sv, Vt = linalg.svd(X - means, full_matrices=False)
        w = sv**2 / (n - 1)
        V = fix_signs(Vt.T)
        if w.size < p:
            w = np.concatenate([w, np.zeros(p - w.size)])
        if not w[-1] >= RANK_TOL * w[0] or w[0] <= 0:
            raise RankDeficient(
                f"sample covariance is numerically singular (eigenvalues {w[0]:.3g} .. {w[-1]:.3g})"
            )
        rotation = V
        if kind == "whiten":
            scales = np.sqrt(w)
    return PreprocessRecord(kind, means, scales, rotation)


def preprocess(data, kind="center"):
    """Transform ``data`` and return ``(transformed, record)``."""
    record = fit(data, kind)
    return record.transform(np.asarray(data, dtype=float)), record
