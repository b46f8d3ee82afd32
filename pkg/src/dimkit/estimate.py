"""Intrinsic dimension estimators.

``mle`` is bottom-up and reports one local estimate per point; the others
return a single global estimate.
"""

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .core import IdeResult, validate
from .errors import (
    AllRatiosOne,
    DegenerateDistances,
    DuplicatePoints,
    InvalidParameter,
    TooFewPoints,
    ZeroTotalVariance,
)
from .preprocess import sample_cov

_CHUNK = 1024


def _sorted_neighbor_distances(X, m):
    """For each row, the ``m`` smallest distances to other rows, ascending.

    Zero distances (duplicates) are kept; callers decide what to do.
    """
    n = X.shape[0]
    out = np.empty((n, m))
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        D = cdist(X[start:stop], X)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        part = np.partition(D, m - 1, axis=1)[:, :m]
        out[start:stop] = np.sort(part, axis=1)
    return out


def est_mle(data, k1=6, k2=12) -> IdeResult:
    """Levina-Bickel maximum likelihood estimator.

    For each ``k`` in ``[k1, k2]`` the per-point estimate is
    ``1 / mean_{j<k} log(T_k / T_j)``, ``T_j`` being the distance to the
    j-th nearest neighbor. The global estimate averages, over ``k``, the
    harmonic mean of the per-point estimates; each local estimate is the
    arithmetic mean over ``k``. Zero distances are ignored, so duplicated
    points need ``k2`` distinct neighbors.
    """
    X = validate(data)
    n = X.shape[0]
    if int(k1) != k1 or int(k2) != k2 or k1 < 2 or k1 > k2:
        raise InvalidParameter(f"need integers 2 <= k1 <= k2, got k1={k1!r}, k2={k2!r}")
    k1, k2 = int(k1), int(k2)
    if n <= k2:
        raise TooFewPoints(f"k2={k2} needs more than {k2} points, got {n}")
    T = _sorted_neighbor_distances(X, n - 1 if n - 1 < 2 * k2 else k2)
    zeros = (T[:, :k2] == 0).sum(axis=1)
    if zeros.any():
        T = _sorted_neighbor_distances(X, n - 1)
        zeros = (T == 0).sum(axis=1)
        if np.any(n - 1 - zeros < k2):
            bad = np.flatnonzero(n - 1 - zeros < k2)
            raise DuplicatePoints(f"point(s) {bad[:10].tolist()} have fewer than {k2} distinct neighbors")
        T = np.stack([row[z : z + k2] for row, z in zip(T, zeros)])
    else:
        T = T[:, :k2]
    logT = np.log(T)
    ks = np.arange(k1, k2 + 1)
    local = np.empty((n, ks.size))
    for c, k in enumerate(ks):
        s = (logT[:, k - 1 : k] - logT[:, : k - 1]).sum(axis=1) / (k - 1)
        with np.errstate(divide="ignore"):
            local[:, c] = 1.0 / s
    # harmonic mean over points of each k, i.e. the inverse of the mean inverse
    per_k = 1.0 / np.mean(1.0 / local, axis=0)
    return IdeResult(
        float(per_k.mean()),
        "mle",
        local_estimates=local.mean(axis=1),
        info={"k1": k1, "k2": k2, "per_k": per_k.tolist()},
    )


def correlation_integral(dists, n, radii):
    """``C(r)``: fraction of the ``n(n-1)/2`` pairs closer than ``r``."""
    s = np.sort(dists)
    return np.searchsorted(s, radii, side="left") / (n * (n - 1) / 2)


def est_corrdim(data, num_radii=20) -> IdeResult:
    """Grassberger-Procaccia correlation dimension.

    Radii are log-spaced between the 5th and 50th percentiles of the nonzero
    pairwise distances; the estimate is the least-squares slope of
    ``log C(r)`` against ``log r`` over radii with ``0 < C(r) < 1``.
    """
    X = validate(data)
    n = X.shape[0]
    if n < 10:
        raise TooFewPoints(f"correlation dimension needs at least 10 points, got {n}")
    if int(num_radii) != num_radii or num_radii < 2:
        raise InvalidParameter(f"need at least 2 radii, got {num_radii!r}")
    dists = pdist(X)
    nz = dists[dists > 0]
    if nz.size == 0 or nz.min() == nz.max():
        raise DegenerateDistances("pairwise distances are all zero or all equal")
    lo, hi = np.percentile(nz, [5, 50])
    if not hi > lo:
        raise DegenerateDistances("5th and 50th percentile distances coincide")
    radii = np.geomspace(lo, hi, int(num_radii))
    C = correlation_integral(dists, n, radii)
    ok = (C > 0) & (C < 1)
    if ok.sum() < 2:
        raise DegenerateDistances("fewer than 2 radii with 0 < C(r) < 1")
    slope, _ = np.polyfit(np.log(radii[ok]), np.log(C[ok]), 1)
    return IdeResult(float(slope), "corrdim", info={"radii": radii[ok].tolist(), "C": C[ok].tolist()})


def est_pcadim(data, variance_threshold=0.95) -> IdeResult:
    """Smallest number of principal components reaching the variance threshold."""
    X = validate(data)
    if not 0 < variance_threshold <= 1:
        raise InvalidParameter(f"threshold must lie in (0, 1], got {variance_threshold!r}")
    w = np.clip(np.linalg.eigvalsh(sample_cov(X))[::-1], 0.0, None)
    if not w.sum() > 0:
        raise ZeroTotalVariance("data has zero total variance")
    ratio = np.cumsum(w) / np.cumsum(w)[-1]
    d = int(np.argmax(ratio >= variance_threshold)) + 1
    return IdeResult(float(d), "pcadim", info={"cumulative_ratio": ratio.tolist()})


def est_twonn(data) -> IdeResult:
    """Two-nearest-neighbor estimator, maximum likelihood form.

    With ``mu_i = r2(i) / r1(i)``, the estimate is ``(N - 1) / sum log mu_i``
    over the ``N`` points whose ratio exceeds one.
    """
    X = validate(data)
    n = X.shape[0]
    if n < 10:
        raise TooFewPoints(f"two-NN needs at least 10 points, got {n}")
    T = _sorted_neighbor_distances(X, 2)
    dup = np.flatnonzero(T[:, 0] == 0)
    if dup.size:
        raise DuplicatePoints(f"point(s) {dup[:10].tolist()} coincide with another point")
    mu = T[:, 1] / T[:, 0]
    keep = mu > 1
    if keep.sum() < 2:
        raise AllRatiosOne("first and second neighbor distances coincide for (almost) every point")
    logs = np.log(mu[keep])
    used = int(keep.sum())
    return IdeResult((used - 1) / logs.sum(), "twonn", info={"excluded": n - used, "used": used})


ESTIMATORS = {
    "mle": est_mle,
    "corrdim": est_corrdim,
    "pcadim": est_pcadim,
    "twonn": est_twonn,
}

BOTTOM_UP = frozenset({"mle"})
