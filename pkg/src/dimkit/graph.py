"""Neighbor graphs and graph geodesics.

Graphs are stored as directed edge lists; a symmetric graph carries both
``(i, j)`` and ``(j, i)``. Weights are Euclidean distances, so duplicate
points yield weight-0 edges (flagged via ``has_duplicates``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import cdist

from .core import validate
from .errors import InvalidParameter, KTooLarge, NegativeWeight, NonPositiveRadius

SYMMETRIZATIONS = ("union", "intersect", "asymmetric")

# rows of the distance matrix held in memory at once
_CHUNK = 1024


class DuplicatePointsWarning(UserWarning):
    pass


@dataclass(frozen=True)
class NeighborGraph:
    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    symmetrization: str = "union"

    def __post_init__(self):
        for name in ("rows", "cols"):
            a = np.array(getattr(self, name), dtype=np.int64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if not (self.rows.shape == self.cols.shape == w.shape):
            raise InvalidParameter("edge arrays must have equal length")
        if self.rows.size and (self.rows.min() < 0 or max(self.rows.max(), self.cols.max()) >= self.n):
            raise InvalidParameter("edge endpoint out of range")
        if np.any(self.rows == self.cols):
            raise InvalidParameter("self-loops are not allowed")

    @property
    def directed(self) -> bool:
        return self.symmetrization == "asymmetric"

    @property
    def has_duplicates(self) -> bool:
        return bool(np.any(self.weights == 0))

    @property
    def n_edges(self) -> int:
        """Number of edges; undirected edges count once."""
        return self.rows.size if self.directed else self.rows.size // 2

    def edge_set(self) -> set:
        """Directed ``(i, j)`` pairs."""
        return set(zip(self.rows.tolist(), self.cols.tolist()))

    def weight_matrix(self, fill=np.inf) -> np.ndarray:
        """Dense ``(n, n)`` matrix of edge weights, ``fill`` where absent."""
        W = np.full((self.n, self.n), fill, dtype=float)
        W[self.rows, self.cols] = self.weights
        return W

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        A[self.rows, self.cols] = True
        return A

    def undirected(self) -> "NeighborGraph":
        """The union-symmetrized version of this graph."""
        if not self.directed:
            return self
        return _symmetrize(self.n, self.rows, self.cols, self.weights, "union")


def _symmetrize(n, rows, cols, weights, mode):
    if mode == "asymmetric":
        return NeighborGraph(n, rows, cols, weights, mode)
    A = np.zeros((n, n), dtype=bool)
    A[rows, cols] = True
    W = np.zeros((n, n))
    W[rows, cols] = weights
    # Euclidean weights are symmetric, so either direction carries the value
    W = np.maximum(W, W.T)
    A = (A | A.T) if mode == "union" else (A & A.T)
    r, c = np.nonzero(A)
    return NeighborGraph(n, r, c, W[r, c], mode)


def _warn_duplicates(g):
    if g.has_duplicates:
        warnings.warn("data contains duplicate points; graph has weight-0 edges", DuplicatePointsWarning, stacklevel=3)
    return g


def knn_indices(X, k):
    """Indices and distances of each row's ``k`` nearest other rows.

    Distance ties resolve to the lower index.
    """
    n = X.shape[0]
    idx = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k))
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        D = cdist(X[start:stop], X)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        order = np.argsort(D, axis=1, kind="stable")[:, :k]
        idx[start:stop] = order
        dist[start:stop] = np.take_along_axis(D, order, axis=1)
    return idx, dist


def knn_graph(data, k: int, symmetrization: str = "union") -> NeighborGraph:
    """k-nearest-neighbor graph with Euclidean edge weights."""
    X = validate(data)
    n = X.shape[0]
    if symmetrization not in SYMMETRIZATIONS:
        raise InvalidParameter(f"unknown symmetrization {symmetrization!r}")
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidParameter(f"k must be a positive integer, got {k!r}")
    k = int(k)
    if k >= n:
        raise KTooLarge(f"k={k} needs at least {k + 1} points, got {n}")
    idx, dist = knn_indices(X, k)
    rows = np.repeat(np.arange(n), k)
    g = _symmetrize(n, rows, idx.ravel(), dist.ravel(), symmetrization)
    return _warn_duplicates(g)


def eps_graph(data, eps: float) -> NeighborGraph:
    """Undirected graph joining every pair within Euclidean distance ``eps``."""
    X = validate(data)
    if not eps > 0:
        raise NonPositiveRadius(f"eps must be positive, got {eps!r}")
    n = X.shape[0]
    rows, cols, weights = [], [], []
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        D = cdist(X[start:stop], X)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        r, c = np.nonzero(D <= eps)
        rows.append(r + start)
        cols.append(c)
        weights.append(D[r, c])
    g = NeighborGraph(n, np.concatenate(rows), np.concatenate(cols), np.concatenate(weights), "union")
    return _warn_duplicates(g)


def floyd_warshall(graph: NeighborGraph) -> np.ndarray:
    """All-pairs shortest path lengths; ``inf`` marks unreachable pairs.

    Each pivot step relaxes the whole matrix at once; pivots run in order.
    """
    if np.any(graph.weights < 0):
        raise NegativeWeight("Floyd-Warshall here requires nonnegative edge weights")
    D = np.full((graph.n, graph.n), np.inf)
    # parallel edges keep the lighter weight
    np.minimum.at(D, (graph.rows, graph.cols), graph.weights)
    np.fill_diagonal(D, 0.0)
    for k in range(graph.n):
        np.minimum(D, D[:, k, None] + D[None, k, :], out=D)
    return D


def connected_components(graph: NeighborGraph) -> list[np.ndarray]:
    """Connected components (edges taken as undirected), ordered by smallest member."""
    A = sparse.coo_matrix(
        (np.ones(graph.rows.size), (graph.rows, graph.cols)), shape=(graph.n, graph.n)
    ).tocsr()
    _, labels = csgraph.connected_components(A, directed=True, connection="weak")
    comps = {}
    for i, lab in enumerate(labels):
        comps.setdefault(lab, []).append(i)
    return sorted((np.array(v) for v in comps.values()), key=lambda c: c[0])
