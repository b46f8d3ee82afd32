"""Dimension-reduction methods.

Every method runs the same pipeline: validate, preprocess (default
``center``), run the algorithm, and return a :class:`ReductionResult`.

==========  ==========  ===========  ===========================================
id          type        supervised   method
==========  ==========  ===========  ===========================================
pca         linear      no           covariance eigendecomposition
pcasvd      linear      no           SVD of the centered data
cmds        nonlinear   no           classical multidimensional scaling
lda         linear      yes          Fisher linear discriminant
lpp         linear      no           locality preserving projections
isomap      nonlinear   no           classical MDS on graph geodesics
lle         nonlinear   no           locally linear embedding
lapeig      nonlinear   no           Laplacian eigenmaps
kpca        nonlinear   no           kernel PCA
fscore      selection   yes          Fisher score feature selection
lscore      selection   no           Laplacian score feature selection
==========  ==========  ===========  ===========================================

Graph-based methods treat the neighbor graph as undirected; an
``asymmetric`` neighborhood is union-symmetrized before use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist

from . import graph as _graph
from ._linalg import fix_signs, gen_sym_eig, sym_eig
from .core import (
    PreprocessRecord,
    ReductionResult,
    check_target_dim,
    selector_matrix,
    validate,
    validate_labels,
)
from .errors import (
    DegenerateVariance,
    DimensionTooLarge,
    DisconnectedGraph,
    InsufficientPositiveEigenvalues,
    InvalidParameter,
    SingularLocalGram,
    SingularWithinScatter,
    TooManyDims,
    ZeroWeightedVariance,
)
from .kernels import KernelSpec, center_kernel, kernel_matrix
from .preprocess import fit as fit_preprocess


@dataclass(frozen=True)
class Neighborhood:
    """Neighbor rule: exactly one of ``k`` or ``eps``."""

    k: Optional[int] = None
    eps: Optional[float] = None
    symmetrization: str = "union"

    def __post_init__(self):
        if (self.k is None) == (self.eps is None):
            raise InvalidParameter("give exactly one of k or eps")
        if self.symmetrization not in _graph.SYMMETRIZATIONS:
            raise InvalidParameter(f"unknown symmetrization {self.symmetrization!r}")

    def build(self, X) -> _graph.NeighborGraph:
        if self.k is not None:
            return _graph.knn_graph(X, self.k, self.symmetrization)
        return _graph.eps_graph(X, self.eps)

    def neighbor_lists(self, X) -> list[np.ndarray]:
        """Per-point neighbor indices, before any symmetrization."""
        if self.k is not None:
            g = _graph.knn_graph(X, self.k, "asymmetric")
        else:
            g = _graph.eps_graph(X, self.eps)
        return [g.cols[g.rows == i] for i in range(g.n)]

    def to_dict(self) -> dict:
        return {"k": self.k, "eps": self.eps, "symmetrization": self.symmetrization}


def as_neighborhood(nb) -> Neighborhood:
    if isinstance(nb, Neighborhood):
        return nb
    if isinstance(nb, (int, np.integer)) and not isinstance(nb, bool):
        return Neighborhood(k=int(nb))
    if isinstance(nb, dict):
        return Neighborhood(**nb)
    raise InvalidParameter("this method needs a neighborhood (k or eps)")


# ---------------------------------------------------------------------------
# shared pieces


def _prepare(data, kind, centered=False):
    X = validate(data)
    record = fit_preprocess(X, kind)
    if centered and record.kind in ("none", "scale"):
        # fold the centering the method needs into the saved record
        record = PreprocessRecord(
            "center" if record.kind == "none" else "cscale",
            X.mean(axis=0),
            record.column_scales,
            record.rotation,
        )
    return X, record.transform(X), record


def _check_embedding_dim(d, n):
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidParameter(f"target dimension must be a positive integer, got {d!r}")
    d = int(d)
    if d >= n:
        raise InsufficientPositiveEigenvalues(f"at most {n - 1} dimensions can be recovered from {n} points, asked for {d}")
    return d


def _connected_graph(Z, neighborhood):
    g = as_neighborhood(neighborhood).build(Z).undirected()
    comps = _graph.connected_components(g)
    if len(comps) > 1:
        sizes = sorted((c.size for c in comps), reverse=True)
        raise DisconnectedGraph(
            f"neighbor graph has {len(comps)} connected components (sizes {sizes}); "
            "increase k or eps"
        )
    return g


def heat_weights(g: _graph.NeighborGraph) -> np.ndarray:
    """Dense heat-kernel affinities ``exp(-d^2 / t)`` on the graph's edges.

    ``t`` is the mean squared edge length.
    """
    sq = g.weights**2
    t = sq.mean() if sq.size and sq.mean() > 0 else 1.0
    W = np.zeros((g.n, g.n))
    W[g.rows, g.cols] = np.exp(-sq / t)
    return np.maximum(W, W.T)


def _positive_tol(w, n):
    return 10 * n * np.finfo(float).eps * max(abs(w[0]), abs(w[-1]), 0.0)


def mds_from_distances(D, d: int):
    """Classical MDS of a distance matrix; returns ``(embedding, eigenvalues)``."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    d = _check_embedding_dim(d, n)
    B = center_kernel(-0.5 * D**2)
    w, V = sym_eig(B, descending=True)
    tol = _positive_tol(w, n)
    npos = int(np.sum(w > tol))
    if npos < d:
        raise InsufficientPositiveEigenvalues(
            f"double-centered matrix has {npos} positive eigenvalue(s), need {d}"
        )
    return V[:, :d] * np.sqrt(w[:d]), w[:d]


# ---------------------------------------------------------------------------
# linear, unsupervised


def pca(data, d, preprocess="center") -> ReductionResult:
    """PCA through the spectral decomposition of the p x p sample covariance."""
    X, Z, record = _prepare(data, preprocess, centered=True)
    n, p = X.shape
    d = check_target_dim(d, p)
    w, V = sym_eig(Z.T @ Z / (n - 1), descending=True)
    w = np.clip(w, 0.0, None)
    P = V[:, :d]
    return ReductionResult(
        Z @ P,
        record,
        "pca",
        projection=P,
        info={"eigenvalues": w[:d].tolist(), "explained_variance_ratio": (w[:d] / w.sum()).tolist()},
    )


def pca_svd(data, d, preprocess="center") -> ReductionResult:
    """PCA through the thin SVD of the centered n x p data."""
    X, Z, record = _prepare(data, preprocess, centered=True)
    n, p = X.shape
    d = check_target_dim(d, p)
    _, s, Vt = linalg.svd(Z, full_matrices=False)
    P = fix_signs(Vt[:d].T)
    w = s**2 / (n - 1)
    return ReductionResult(
        Z @ P,
        record,
        "pcasvd",
        projection=P,
        info={
            "singular_values": s.tolist(),
            "eigenvalues": w[:d].tolist(),
            "explained_variance_ratio": (w[:d] / w.sum()).tolist(),
        },
    )


def lpp(data, d, neighborhood, preprocess="center") -> ReductionResult:
    """Locality preserving projections.

    Solves ``X^T L X a = lam X^T D X a`` for the ``d`` smallest ``lam`` with
    heat-kernel weights, and normalizes ``a^T X^T D X a = 1``. When
    ``X^T D X`` is singular the problem is solved inside its range (the span
    of the data), which is where every informative direction lives.
    """
    X, Z, record = _prepare(data, preprocess)
    p = X.shape[1]
    d = check_target_dim(d, p)
    g = _connected_graph(Z, neighborhood)
    W = heat_weights(g)
    deg = W.sum(axis=1)
    A = Z.T @ ((np.diag(deg) - W) @ Z)
    B = Z.T @ (deg[:, None] * Z)
    A = (A + A.T) / 2
    B = (B + B.T) / 2
    wb, U = linalg.eigh(B)
    if wb[0] < 1e-12 * wb[-1]:
        U = U[:, wb > 1e-12 * wb[-1]]
        if U.shape[1] < d:
            raise DimensionTooLarge(f"data span only {U.shape[1]} dimension(s), asked for {d}")
        lam, Vr, _ = gen_sym_eig(U.T @ A @ U, U.T @ B @ U, DimensionTooLarge)
        V = fix_signs(U @ Vr)
    else:
        lam, V, _ = gen_sym_eig(A, B, DimensionTooLarge)
    P = V[:, :d]
    return ReductionResult(
        Z @ P,
        record,
        "lpp",
        projection=P,
        info={"eigenvalues": lam[:d].tolist(), "neighborhood": as_neighborhood(neighborhood).to_dict()},
    )


# ---------------------------------------------------------------------------
# linear, supervised


def lda(data, labels, d, preprocess="center") -> ReductionResult:
    """Fisher linear discriminant: top eigenvectors of ``Sw^-1 Sb``.

    ``Sw`` gets a ridge of ``1e-8 * trace(Sw) / p``; the chosen directions
    are orthonormalized by QR.
    """
    X, Z, record = _prepare(data, preprocess, centered=True)
    n, p = X.shape
    y = validate_labels(labels, n)
    classes, counts = np.unique(y, return_counts=True)
    c = classes.size
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidParameter(f"target dimension must be a positive integer, got {d!r}")
    if d > c - 1:
        raise TooManyDims(f"LDA with {c} classes yields at most {c - 1} dimension(s), asked for {d}")
    d = check_target_dim(d, p)
    if counts.min() < 2:
        raise InvalidParameter(f"every class needs at least 2 samples; class {classes[counts.argmin()]} has 1")
    mu = Z.mean(axis=0)
    Sw = np.zeros((p, p))
    Sb = np.zeros((p, p))
    for cls, nc in zip(classes, counts):
        Zc = Z[y == cls]
        mc = Zc.mean(axis=0)
        R = Zc - mc
        Sw += R.T @ R
        Sb += nc * np.outer(mc - mu, mc - mu)
    tr = np.trace(Sw)
    if not tr > 0:
        raise SingularWithinScatter("within-class scatter is zero")
    Sw += 1e-8 * tr / p * np.eye(p)
    lam, V, _ = gen_sym_eig(Sb, Sw, SingularWithinScatter, descending=True)
    Q, _ = np.linalg.qr(V[:, :d])
    P = fix_signs(Q)
    return ReductionResult(
        Z @ P, record, "lda", projection=P, info={"eigenvalues": lam[:d].tolist(), "classes": classes.tolist()}
    )


# ---------------------------------------------------------------------------
# nonlinear, unsupervised


def classical_mds(data, d, preprocess="center") -> ReductionResult:
    """Classical MDS on Euclidean distances (no projection matrix)."""
    X, Z, record = _prepare(data, preprocess)
    Y, w = mds_from_distances(cdist(Z, Z), d)
    return ReductionResult(Y, record, "cmds", info={"eigenvalues": w.tolist()})


def isomap(data, d, neighborhood, preprocess="center") -> ReductionResult:
    """Classical MDS on Floyd-Warshall geodesics of a neighbor graph."""
    X, Z, record = _prepare(data, preprocess)
    d = check_target_dim(d, X.shape[1])
    g = _connected_graph(Z, neighborhood)
    G = _graph.floyd_warshall(g)
    Y, w = mds_from_distances(G, d)
    return ReductionResult(
        Y, record, "isomap", info={"eigenvalues": w.tolist(), "neighborhood": as_neighborhood(neighborhood).to_dict()}
    )


def lle_weights(Z, neighbors) -> np.ndarray:
    """Dense ``(n, n)`` LLE reconstruction weights; each row sums to one.

    The local Gram matrix gets a ridge of ``1e-3 * trace(G) / k`` when
    ``k > p`` or its condition number exceeds ``1e12``.
    """
    n, p = Z.shape
    W = np.zeros((n, n))
    for i, nb in enumerate(neighbors):
        k = nb.size
        if k == 0:
            raise SingularLocalGram(f"point {i} has no neighbors")
        N = Z[nb] - Z[i]
        G = N @ N.T
        if k > p or np.linalg.cond(G) > 1e12:
            G = G + 1e-3 * np.trace(G) / k * np.eye(k)
        try:
            w = linalg.solve(G, np.ones(k), assume_a="sym")
        except (linalg.LinAlgError, ValueError):
            raise SingularLocalGram(f"local Gram matrix of point {i} is singular") from None
        s = w.sum()
        if not np.all(np.isfinite(w)) or s == 0:
            raise SingularLocalGram(f"local Gram matrix of point {i} is singular")
        W[i, nb] = w / s
    return W


def lle(data, d, neighborhood, preprocess="center") -> ReductionResult:
    """Locally linear embedding.

    Columns are eigenvectors 2..d+1 of ``(I - W)^T (I - W)``, scaled to norm
    ``sqrt(n)``.
    """
    X, Z, record = _prepare(data, preprocess)
    n, p = X.shape
    d = check_target_dim(d, p)
    nb = as_neighborhood(neighborhood)
    _connected_graph(Z, nb)
    W = lle_weights(Z, nb.neighbor_lists(Z))
    if d + 1 > n:
        raise InsufficientPositiveEigenvalues(f"need more than {d} points")
    # right singular vectors of I - W are the eigenvectors of (I - W)^T (I - W);
    # the SVD resolves the tiny bottom eigenvalues far more accurately
    _, s, Vt = linalg.svd(np.eye(n) - W)
    order = np.argsort(s, kind="stable")
    V = fix_signs(Vt[order].T)
    w = s[order] ** 2
    Y = V[:, 1 : d + 1] * np.sqrt(n)
    return ReductionResult(
        Y, record, "lle", info={"eigenvalues": w[1 : d + 1].tolist(), "neighborhood": nb.to_dict()}
    )


def laplacian_eigenmaps(data, d, neighborhood, preprocess="center") -> ReductionResult:
    """Generalized eigenvectors of ``L f = lam D f`` with the constant one dropped."""
    X, Z, record = _prepare(data, preprocess)
    n, p = X.shape
    d = check_target_dim(d, p)
    if d + 1 > n:
        raise InsufficientPositiveEigenvalues(f"need more than {d} points")
    g = _connected_graph(Z, neighborhood)
    W = heat_weights(g)
    deg = W.sum(axis=1)
    lam, F, _ = gen_sym_eig(np.diag(deg) - W, np.diag(deg), DisconnectedGraph)
    return ReductionResult(
        F[:, 1 : d + 1],
        record,
        "lapeig",
        info={
            "eigenvalues": lam[1 : d + 1].tolist(),
            "trivial_eigenvalue": float(lam[0]),
            "neighborhood": as_neighborhood(neighborhood).to_dict(),
        },
    )


def kernel_pca(data, d, kernel: KernelSpec | str = "gaussian", preprocess="center") -> ReductionResult:
    """Kernel PCA: column j is ``sqrt(lam_j) v_j`` of the centered Gram matrix."""
    X, Z, record = _prepare(data, preprocess)
    n = X.shape[0]
    d = _check_embedding_dim(d, n)
    spec = kernel if isinstance(kernel, KernelSpec) else KernelSpec(kernel)
    Kc = center_kernel(kernel_matrix(Z, spec))
    w, V = sym_eig(Kc, descending=True)
    tol = _positive_tol(w, n)
    npos = int(np.sum(w > tol))
    if npos < d:
        raise InsufficientPositiveEigenvalues(f"centered Gram matrix has {npos} positive eigenvalue(s), need {d}")
    return ReductionResult(
        V[:, :d] * np.sqrt(w[:d]),
        record,
        "kpca",
        info={"eigenvalues": w[:d].tolist(), "kernel": spec.kind, "kernel_params": dict(spec.params)},
    )


# ---------------------------------------------------------------------------
# feature selection


def _selection_result(Z, record, scores, order, d, method, extra=None):
    idx = order[:d]
    P = selector_matrix(idx, Z.shape[1])
    info = {"scores": [float(s) for s in scores]}
    info.update(extra or {})
    return ReductionResult(Z[:, idx], record, method, projection=P, selected_features=idx, info=info)


def fisher_scores(Z, y) -> np.ndarray:
    """Per-feature Fisher criterion; ``inf`` for perfectly separated features."""
    classes = np.unique(y)
    mu = Z.mean(axis=0)
    num = np.zeros(Z.shape[1])
    den = np.zeros(Z.shape[1])
    for cls in classes:
        Zc = Z[y == cls]
        nc = Zc.shape[0]
        mc = Zc.mean(axis=0)
        num += nc * (mc - mu) ** 2
        den += nc * Zc.var(axis=0)
    total = ((Z - mu) ** 2).sum(axis=0)
    scores = np.empty_like(num)
    zero = den <= 1e-12 * total
    scores[~zero] = num[~zero] / den[~zero]
    scores[zero & (num > 0)] = np.inf
    scores[zero & ~(num > 0)] = np.nan
    return scores


def fisher_score(data, labels, d, preprocess="center") -> ReductionResult:
    """Select the ``d`` features with the largest Fisher scores."""
    X, Z, record = _prepare(data, preprocess)
    n, p = X.shape
    d = check_target_dim(d, p)
    y = validate_labels(labels, n)
    scores = fisher_scores(Z, y)
    bad = np.flatnonzero(np.isnan(scores))
    if bad.size:
        raise DegenerateVariance(f"feature(s) {bad.tolist()} are constant; Fisher score undefined")
    order = np.lexsort((np.arange(p), -scores))
    return _selection_result(Z, record, scores, order, d, "fscore")


def laplacian_scores(Z, W) -> np.ndarray:
    deg = W.sum(axis=1)
    L = np.diag(deg) - W
    F = Z - (deg @ Z) / deg.sum()
    num = np.einsum("ir,ij,jr->r", F, L, F)
    den = np.einsum("ir,i,ir->r", F, deg, F)
    ref = np.einsum("ir,i,ir->r", Z, deg, Z)
    bad = np.flatnonzero(den <= 1e-12 * ref)
    if bad.size:
        raise ZeroWeightedVariance(f"feature(s) {bad.tolist()} have zero degree-weighted variance")
    return num / den


def laplacian_score(data, d, neighborhood, preprocess="center") -> ReductionResult:
    """Select the ``d`` features that vary most smoothly on the neighbor graph."""
    X, Z, record = _prepare(data, preprocess)
    p = X.shape[1]
    d = check_target_dim(d, p)
    nb = as_neighborhood(neighborhood)
    W = heat_weights(nb.build(Z).undirected())
    scores = laplacian_scores(Z, W)
    order = np.lexsort((np.arange(p), scores))
    return _selection_result(Z, record, scores, order, d, "lscore", {"neighborhood": nb.to_dict()})


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class MethodInfo:
    func: Callable
    kind: str  # linear | nonlinear | selection
    supervised: bool = False
    needs_neighborhood: bool = False
    uses_kernel: bool = False

    @property
    def linear(self) -> bool:
        return self.kind in ("linear", "selection")


METHODS: dict[str, MethodInfo] = {
    "pca": MethodInfo(pca, "linear"),
    "pcasvd": MethodInfo(pca_svd, "linear"),
    "cmds": MethodInfo(classical_mds, "nonlinear"),
    "lda": MethodInfo(lda, "linear", supervised=True),
    "lpp": MethodInfo(lpp, "linear", needs_neighborhood=True),
    "isomap": MethodInfo(isomap, "nonlinear", needs_neighborhood=True),
    "lle": MethodInfo(lle, "nonlinear", needs_neighborhood=True),
    "lapeig": MethodInfo(laplacian_eigenmaps, "nonlinear", needs_neighborhood=True),
    "kpca": MethodInfo(kernel_pca, "nonlinear", uses_kernel=True),
    "fscore": MethodInfo(fisher_score, "selection", supervised=True),
    "lscore": MethodInfo(laplacian_score, "selection", needs_neighborhood=True),
}


@dataclass(frozen=True)
class ReducerConfig:
    method: str
    d: int
    preprocess: str = "center"
    neighborhood: Optional[Neighborhood] = None
    kernel: Optional[KernelSpec] = None
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameter(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        info = METHODS[self.method]
        if info.supervised and self.labels is None:
            raise InvalidParameter(f"{self.method} is supervised and needs labels")
        if not info.supervised and self.labels is not None:
            raise InvalidParameter(f"{self.method} is unsupervised and does not take labels")
        if info.needs_neighborhood and self.neighborhood is None:
            raise InvalidParameter(f"{self.method} needs a neighborhood (k or eps)")
        if not info.uses_kernel and self.kernel is not None:
            raise InvalidParameter(f"{self.method} does not use a kernel")


def reduce(data, config: ReducerConfig) -> ReductionResult:
    """Run the method named in ``config``."""
    info = METHODS[config.method]
    kwargs = {"preprocess": config.preprocess}
    if info.needs_neighborhood:
        kwargs["neighborhood"] = config.neighborhood
    if info.uses_kernel and config.kernel is not None:
        kwargs["kernel"] = config.kernel
    if info.supervised:
        return info.func(data, config.labels, config.d, **kwargs)
    return info.func(data, config.d, **kwargs)
