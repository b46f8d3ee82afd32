"""Kernel (Gram) matrices for a fixed catalog of kernels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .core import validate
from .errors import InvalidParameter, NegativeEntries, ZeroVector

KERNELS = (
    "linear",
    "polynomial",
    "gaussian",
    "laplacian",
    "sigmoid",
    "cosine",
    "cauchy",
    "inverse-multiquadric",
    "chi-square",
    "histogram-intersection",
)

# kinds whose Gram matrix is positive semidefinite for any data
PD_KERNELS = frozenset(
    {"linear", "polynomial", "gaussian", "laplacian", "cosine", "cauchy", "inverse-multiquadric"}
)

_DEFAULTS = {
    "polynomial": {"degree": 2, "offset": 1.0},
    "gaussian": {"bandwidth": None},
    "laplacian": {"bandwidth": None},
    "cauchy": {"bandwidth": None},
    "sigmoid": {"slope": None, "offset": 0.0},
    "inverse-multiquadric": {"shift": 1.0},
}


@dataclass(frozen=True)
class KernelSpec:
    """A kernel kind plus its parameters.

    Parameters by kind: ``degree``/``offset`` (polynomial), ``bandwidth``
    (gaussian, laplacian, cauchy; ``None`` means the median heuristic),
    ``slope``/``offset`` (sigmoid; slope ``None`` means ``1/p``) and
    ``shift`` (inverse-multiquadric).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise InvalidParameter(f"unknown kernel {self.kind!r}; choose from {KERNELS}")
        allowed = _DEFAULTS.get(self.kind, {})
        extra = set(self.params) - set(allowed)
        if extra:
            raise InvalidParameter(f"kernel {self.kind!r} takes no parameter(s) {sorted(extra)}")
        merged = {**allowed, **self.params}
        object.__setattr__(self, "params", merged)
        bw = merged.get("bandwidth")
        if bw is not None and not bw > 0:
            raise InvalidParameter(f"bandwidth must be positive, got {bw!r}")
        if self.kind == "polynomial":
            deg = merged["degree"]
            if isinstance(deg, bool) or int(deg) != deg or deg < 1:
                raise InvalidParameter(f"polynomial degree must be a positive integer, got {deg!r}")
        if self.kind == "inverse-multiquadric" and not merged["shift"] > 0:
            raise InvalidParameter(f"shift must be positive, got {merged['shift']!r}")

    @property
    def is_pd(self) -> bool:
        return self.kind in PD_KERNELS


def median_bandwidth(X) -> float:
    """Median of the nonzero pairwise Euclidean distances."""
    d = pdist(X)
    d = d[d > 0]
    if d.size == 0:
        raise InvalidParameter("cannot pick a bandwidth: all points coincide")
    return float(np.median(d))


def _mirror(K):
    # one value per unordered pair: copy the upper triangle onto the lower
    iu = np.triu_indices(K.shape[0], 1)
    K[(iu[1], iu[0])] = K[iu]
    return K


def kernel_matrix(data, spec: KernelSpec | str) -> np.ndarray:
    """The ``(n, n)`` Gram matrix ``K[i, j] = k(x_i, x_j)``."""
    X = validate(data)
    if isinstance(spec, str):
        spec = KernelSpec(spec)
    kind, prm = spec.kind, spec.params
    if kind in ("chi-square", "histogram-intersection") and np.any(X < 0):
        raise NegativeEntries(f"{kind} kernel needs nonnegative data")
    bw = prm.get("bandwidth")
    if kind in ("gaussian", "laplacian", "cauchy") and bw is None:
        bw = median_bandwidth(X)

    if kind == "linear":
        K = X @ X.T
    elif kind == "polynomial":
        K = (X @ X.T + prm["offset"]) ** int(prm["degree"])
    elif kind == "gaussian":
        K = np.exp(-cdist(X, X, "sqeuclidean") / (2 * bw**2))
    elif kind == "laplacian":
        K = np.exp(-cdist(X, X, "cityblock") / bw)
    elif kind == "sigmoid":
        slope = prm["slope"] if prm["slope"] is not None else 1.0 / X.shape[1]
        K = np.tanh(slope * (X @ X.T) + prm["offset"])
    elif kind == "cosine":
        norms = np.linalg.norm(X, axis=1)
        zero = np.flatnonzero(norms == 0)
        if zero.size:
            raise ZeroVector(f"cosine kernel undefined for all-zero row(s) {zero.tolist()}")
        K = (X @ X.T) / np.outer(norms, norms)
    elif kind == "cauchy":
        K = 1.0 / (1.0 + cdist(X, X, "sqeuclidean") / bw**2)
    elif kind == "inverse-multiquadric":
        K = 1.0 / np.sqrt(cdist(X, X, "sqeuclidean") + prm["shift"] ** 2)
    elif kind == "chi-square":
        K = np.empty((X.shape[0],) * 2)
        for i, x in enumerate(X):
            S = x + X
            # 0/0 terms contribute 0
            K[i] = np.where(S > 0, 2.0 * x * X / np.where(S > 0, S, 1.0), 0.0).sum(axis=1)
    else:  # histogram-intersection
        K = np.stack([np.minimum(x, X).sum(axis=1) for x in X])
    return _mirror(np.array(K, dtype=float))


def center_kernel(gram) -> np.ndarray:
    """Double-center a Gram matrix: ``J K J`` with ``J = I - 11^T/n``."""
    K = np.asarray(gram, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidParameter(f"Gram matrix must be square, got {K.shape}")
    row = K.mean(axis=1, keepdims=True)
    col = K.mean(axis=0, keepdims=True)
    Kc = K - row - col + K.mean()
    return _mirror(Kc)
