"""Shared data model: validated data matrices and the result records.

A reducer takes an ``(n, p)`` data matrix whose rows are observations and
returns a :class:`ReductionResult`; an estimator returns an
:class:`IdeResult`. Both are frozen and hold read-only arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    EmptyColumns,
    InvalidParameter,
    NonFinite,
    TooFewRows,
)

PREPROCESS_KINDS = ("none", "center", "scale", "cscale", "decorrelate", "whiten")


def _frozen(a, dtype=float):
    if a is None:
        return None
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def validate(data) -> np.ndarray:
    """Check that ``data`` is a finite 2-D matrix with at least two rows.

    Returns the data as a float64 array (the same object when it already is
    one). Raises ``NonFinite`` naming the first offending entry,
    ``TooFewRows`` or ``EmptyColumns``.
    """
    X = np.asarray(data, dtype=float)
    if X.ndim != 2:
        raise InvalidParameter(f"data must be a 2-D matrix, got {X.ndim} dimension(s)")
    n, p = X.shape
    if p < 1:
        raise EmptyColumns("data has no columns")
    if n < 2:
        raise TooFewRows(f"need at least 2 rows, got {n}")
    bad = ~np.isfinite(X)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NonFinite(f"non-finite entry {X[i, j]!r} at row {i}, column {j}")
    return X


def check_target_dim(d, p: int) -> int:
    """Validate a target dimension for a projection method: ``1 <= d < p``."""
    if isinstance(d, bool) or int(d) != d:
        raise InvalidParameter(f"target dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 1:
        raise InvalidParameter(f"target dimension must be positive, got {d}")
    if d >= p:
        raise DimensionTooLarge(f"target dimension {d} must be smaller than the data dimension {p}")
    return d


def validate_labels(labels, n: int) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1 or y.shape[0] != n:
        raise DimensionMismatch(f"expected {n} labels, got shape {y.shape}")
    if not np.issubdtype(y.dtype, np.integer):
        if not np.all(np.equal(np.mod(y, 1), 0)):
            raise InvalidParameter("labels must be integer class identifiers")
        y = y.astype(np.int64)
    if np.unique(y).size < 2:
        raise InvalidParameter("supervised methods need at least 2 distinct classes")
    return y


@dataclass(frozen=True)
class PreprocessRecord:
    """A saved preprocessing transformation.

    New data ``Z`` is mapped as ``((Z - column_means) @ rotation) / column_scales``.
    For ``whiten`` the scales therefore act on the rotated columns.
    """

    kind: str
    column_means: np.ndarray
    column_scales: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        if self.kind not in PREPROCESS_KINDS:
            raise InvalidParameter(f"unknown preprocessing kind {self.kind!r}")
        object.__setattr__(self, "column_means", _frozen(self.column_means))
        object.__setattr__(self, "column_scales", _frozen(self.column_scales))
        object.__setattr__(self, "rotation", _frozen(self.rotation))
        p = self.column_means.shape[0]
        if self.column_scales.shape != (p,) or self.rotation.shape != (p, p):
            raise DimensionMismatch("inconsistent preprocessing record shapes")

    @classmethod
    def identity(cls, p: int) -> "PreprocessRecord":
        return cls("none", np.zeros(p), np.ones(p), np.eye(p))

    @property
    def p(self) -> int:
        return self.column_means.shape[0]

    def transform(self, data) -> np.ndarray:
        X = np.asarray(data, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.p:
            raise DimensionMismatch(f"record expects {self.p} columns, data has shape {X.shape}")
        Z = X - self.column_means
        if self.kind in ("decorrelate", "whiten"):
            Z = Z @ self.rotation
        return Z / self.column_scales

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "column_means": self.column_means.tolist(),
            "column_scales": self.column_scales.tolist(),
            "rotation": self.rotation.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessRecord":
        return cls(d["kind"], d["column_means"], d["column_scales"], d["rotation"])


@dataclass(frozen=True)
class ReductionResult:
    """Output of a dimension-reduction method.

    ``projection`` is present exactly for linear methods and
    ``selected_features`` exactly for feature-selection methods, in which
    case the projection is the 0/1 selector for those (0-based) columns.
    """

    embedding: np.ndarray
    preprocess: PreprocessRecord
    method: str
    projection: Optional[np.ndarray] = None
    selected_features: Optional[np.ndarray] = None
    info: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "embedding", _frozen(self.embedding))
        object.__setattr__(self, "projection", _frozen(self.projection))
        object.__setattr__(self, "selected_features", _frozen(self.selected_features, dtype=np.int64))
        Y, P, S = self.embedding, self.projection, self.selected_features
        if Y.ndim != 2:
            raise DimensionMismatch("embedding must be 2-D")
        d = Y.shape[1]
        if P is not None and (P.ndim != 2 or P.shape[1] != d):
            raise DimensionMismatch(f"projection shape {P.shape} does not match d={d}")
        if S is not None:
            if P is None:
                raise InvalidParameter("feature selection requires a selector projection")
            p = P.shape[0]
            if S.shape != (d,) or np.unique(S).size != d or S.min() < 0 or S.max() >= p:
                raise InvalidParameter(f"invalid selected feature indices {S.tolist()}")
            if not np.array_equal(P, selector_matrix(S, p)):
                raise InvalidParameter("projection is not the selector for selected_features")

    @property
    def d(self) -> int:
        return self.embedding.shape[1]

    @property
    def is_linear(self) -> bool:
        return self.projection is not None


@dataclass(frozen=True)
class IdeResult:
    """Output of an intrinsic dimension estimator.

    ``estdim`` is a positive real, never rounded. ``local_estimates`` is only
    set by bottom-up estimators.
    """

    estdim: float
    method: str
    local_estimates: Optional[np.ndarray] = None
    info: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        est = float(self.estdim)
        if not est > 0:
            raise InvalidParameter(f"estimated dimension must be positive, got {est}")
        object.__setattr__(self, "estdim", est)
        loc = _frozen(self.local_estimates)
        if loc is not None and (loc.ndim != 1 or not np.all(loc > 0)):
            raise InvalidParameter("local estimates must be a vector of positive values")
        object.__setattr__(self, "local_estimates", loc)


def selector_matrix(indices, p: int) -> np.ndarray:
    """The ``(p, d)`` 0/1 matrix picking columns ``indices`` in order."""
    indices = np.asarray(indices, dtype=np.int64)
    P = np.zeros((p, indices.size))
    P[indices, np.arange(indices.size)] = 1.0
    return P


def apply_to_new(record: PreprocessRecord, projection, new_data) -> np.ndarray:
    """Embed new observations with a linear method's saved transformation."""
    P = np.asarray(projection, dtype=float)
    if P.ndim != 2 or P.shape[1] < 1:
        raise DimensionMismatch(f"projection must be a (p, d) matrix with d >= 1, got {P.shape}")
    Z = np.asarray(new_data, dtype=float)
    if Z.ndim == 1:
        Z = Z[None, :]
    if Z.shape[1] != record.p or P.shape[0] != record.p:
        raise DimensionMismatch(
            f"new data has {Z.shape[1]} columns, record {record.p}, projection {P.shape[0]} rows"
        )
    if not np.all(np.isfinite(Z)):
        raise NonFinite("new data contains non-finite entries")
    return record.transform(Z) @ P
