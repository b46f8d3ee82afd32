import numpy as np
import pytest
from scipy.linalg import subspace_angles
from scipy.spatial.distance import pdist

from dimkit.core import apply_to_new, selector_matrix
from dimkit.errors import (
    DegenerateVariance,
    DimensionTooLarge,
    DisconnectedGraph,
    InsufficientPositiveEigenvalues,
    InvalidParameter,
    TooManyDims,
    ZeroWeightedVariance,
)
from dimkit.generate import generate
from dimkit.graph import floyd_warshall, knn_graph
from dimkit.kernels import KernelSpec
from dimkit.reduce import (
    METHODS,
    Neighborhood,
    ReducerConfig,
    classical_mds,
    fisher_score,
    heat_weights,
    isomap,
    kernel_pca,
    laplacian_eigenmaps,
    laplacian_score,
    lda,
    lle,
    lle_weights,
    lpp,
    pca,
    pca_svd,
    reduce,
)

from oracles import fisher_scores_loop, lle_weights_lagrange, procrustes_residual, rank_corr, two_pass_cov


def _align(A, B):
    signs = np.where(np.sum(A * B, axis=0) < 0, -1.0, 1.0)
    return B * signs


def _random_data(rng, n, p):
    # distinct, well-separated covariance eigenvalues
    Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    scales = np.linspace(3.0, 0.5, p)
    return (rng.standard_normal((n, p)) * scales) @ Q.T + rng.uniform(-2, 2, p)


# --- pca -------------------------------------------------------------------


def test_pca_line_direction():
    t = np.linspace(-1, 1, 11)
    res = pca(np.c_[t, t], 1)
    np.testing.assert_allclose(res.projection[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-12)


def test_pca_exact_rank_reconstruction(rng):
    X = rng.standard_normal((40, 2)) @ rng.standard_normal((2, 5)) + 3.0
    res = pca(X, 2)
    Xhat = res.embedding @ res.projection.T + res.preprocess.column_means
    np.testing.assert_allclose(Xhat, X, atol=1e-8, rtol=0)


def test_pca_subspace_matches_dense_oracle(rng):
    X = _random_data(rng, 50, 6)
    res = pca(X, 3)
    w, V = np.linalg.eig(two_pass_cov(X))
    top = V[:, np.argsort(-w.real)[:3]].real
    assert np.max(subspace_angles(res.projection, top)) <= 1e-8


def test_pca_info_and_contract(rng):
    X = _random_data(rng, 30, 4)
    res = pca(X, 2)
    assert res.projection.shape == (4, 2)
    np.testing.assert_allclose(res.projection.T @ res.projection, np.eye(2), atol=1e-12)
    ratios = res.info["explained_variance_ratio"]
    assert 0 < sum(ratios) <= 1 and ratios[0] >= ratios[1]
    with pytest.raises(DimensionTooLarge):
        pca(X, 4)


def test_pca_noncentering_preprocess_folds_centering(rng):
    X = _random_data(rng, 40, 3)
    for kind, folded in (("none", "center"), ("scale", "cscale")):
        res = pca(X, 2, preprocess=kind)
        assert res.preprocess.kind == folded
        np.testing.assert_allclose(res.embedding.mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(apply_to_new(res.preprocess, res.projection, X), res.embedding, atol=1e-8)


def test_pca_svd_matches_pca(rng):
    X = _random_data(rng, 200, 10)
    a, b = pca(X, 4), pca_svd(X, 4)
    assert np.max(np.abs(a.embedding - _align(a.embedding, b.embedding))) <= 1e-8
    np.testing.assert_allclose(np.abs(a.embedding), np.abs(b.embedding), atol=1e-8)


def test_pca_svd_rank_d_singular_values(rng):
    X = rng.standard_normal((60, 3)) @ rng.standard_normal((3, 8))
    s = np.array(pca_svd(X, 3).info["singular_values"])
    assert np.all(s[3:] <= 1e-8 * s[0])


# --- classical MDS -----------------------------------------------------------


def test_cmds_345_triangle():
    X = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]])
    res = classical_mds(X, 2)
    np.testing.assert_allclose(sorted(pdist(res.embedding)), [3.0, 4.0, 5.0], atol=1e-8)
    assert res.projection is None


def test_cmds_full_dimension_preserves_distances(rng):
    X = rng.standard_normal((15, 3))
    np.testing.assert_allclose(pdist(classical_mds(X, 3).embedding), pdist(X), atol=1e-8)


def test_cmds_pca_duality(rng):
    X = _random_data(rng, 30, 5)
    assert procrustes_residual(pca(X, 2).embedding, classical_mds(X, 2).embedding) <= 1e-8


def test_cmds_insufficient_eigenvalues(rng):
    X = np.outer(rng.standard_normal(10), [1.0, 2.0])
    with pytest.raises(InsufficientPositiveEigenvalues):
        classical_mds(X, 2)


# --- lda -------------------------------------------------------------------


def test_lda_axis_direction(rng):
    # sign patterns give a diagonal within-class scatter
    base = np.array([[a, b, c] for a in (-1, 1) for b in (-2, 2) for c in (-0.5, 0.5)], dtype=float)
    X = np.vstack([base, base + [8.0, 0.0, 0.0]])
    y = np.repeat([0, 1], 8)
    res = lda(X, y, 1)
    assert abs(res.projection[0, 0]) >= 1 - 1e-6


def test_lda_three_classes_separation(rng):
    centers = np.array([[0, 0, 0, 0], [10, 0, 0, 0], [0, 10, 0, 0]], dtype=float)
    X = np.vstack([c + rng.standard_normal((40, 4)) for c in centers])
    y = np.repeat([0, 1, 2], 40)
    res = lda(X, y, 2)
    Y = res.embedding
    means = np.array([Y[y == c].mean(axis=0) for c in range(3)])
    within = max(np.sqrt(np.mean(np.sum((Y[y == c] - means[c]) ** 2, axis=1) / 2)) for c in range(3))
    assert min(pdist(means)) >= 5 * within
    np.testing.assert_allclose(res.projection.T @ res.projection, np.eye(2), atol=1e-10)


def test_lda_too_many_dims(rng):
    X = rng.standard_normal((30, 5))
    y = np.repeat([0, 1, 2], 10)
    with pytest.raises(TooManyDims, match="TooManyDims"):
        lda(X, y, 3)


def test_lda_needs_two_per_class(rng):
    X = rng.standard_normal((5, 3))
    with pytest.raises(InvalidParameter):
        lda(X, [0, 0, 0, 0, 1], 1)


# --- lpp -------------------------------------------------------------------


def test_lpp_line_ordering(rng):
    t = rng.permutation(np.linspace(0, 10, 30))
    X = np.outer(t, [1.0, 2.0, -1.0]) + 4.0
    res = lpp(X, 1, 2)
    assert abs(rank_corr(res.embedding[:, 0], t)) == pytest.approx(1.0)


def test_lpp_generalized_residual_and_normalization(rng):
    X = _random_data(rng, 60, 5)
    res = lpp(X, 3, 6)
    Z = res.preprocess.transform(X)
    g = knn_graph(Z, 6)
    W = heat_weights(g)
    D = np.diag(W.sum(axis=1))
    A = Z.T @ (D - W) @ Z
    B = Z.T @ D @ Z
    for j, lam in enumerate(res.info["eigenvalues"]):
        a = res.projection[:, j]
        assert np.linalg.norm(A @ a - lam * B @ a) <= 1e-8
        assert a @ B @ a == pytest.approx(1.0, abs=1e-8)
    assert np.all(np.diff(res.info["eigenvalues"]) >= 0)


def test_lpp_disconnected(rng):
    X = np.vstack([rng.uniform(0, 1, (15, 3)), rng.uniform(0, 1, (15, 3)) + 500])
    with pytest.raises(DisconnectedGraph):
        lpp(X, 1, 3)


# --- isomap ----------------------------------------------------------------


def test_isomap_flat_plane_exact(rng):
    # with k = n - 1 the graph is complete and geodesics are Euclidean
    uv = rng.uniform(-1, 1, (11, 2))
    basis, _ = np.linalg.qr(rng.standard_normal((5, 2)))
    X = uv @ basis.T + rng.standard_normal(5)
    res = isomap(X, 2, 10)
    assert procrustes_residual(uv, res.embedding) <= 1e-6
    assert res.projection is None


def test_isomap_disconnected_message(rng):
    X = np.vstack([rng.uniform(0, 1, (20, 3)), rng.uniform(0, 1, (20, 3)) + 1000])
    with pytest.raises(DisconnectedGraph, match=r"2 connected components .*sizes \[20, 20\].*increase k or eps"):
        isomap(X, 2, 3)


def test_isomap_eps_neighborhood(rng):
    X, _ = generate("helix", 200, seed=2)
    res = isomap(X, 1, Neighborhood(eps=0.6))
    assert res.embedding.shape == (200, 1)


# --- lle -------------------------------------------------------------------


def test_lle_weight_rows_sum_to_one():
    X, _ = generate("swissroll", 200, seed=3)
    nb = Neighborhood(k=8)
    W = lle_weights(X, nb.neighbor_lists(X))
    assert np.max(np.abs(W.sum(axis=1) - 1)) <= 1e-10


def test_lle_symmetric_line_weights():
    X = np.array([[0.0], [1.0], [2.0], [5.0], [9.0]])
    W = lle_weights(X, Neighborhood(k=2).neighbor_lists(X))
    np.testing.assert_allclose(W[1, [0, 2]], [0.5, 0.5], atol=1e-12)


@pytest.mark.parametrize("k", [3, 5])
def test_lle_weights_match_lagrange_oracle(k, rng):
    Z = rng.standard_normal((12, 3))
    neighbors = Neighborhood(k=k).neighbor_lists(Z)
    W = lle_weights(Z, neighbors)
    for i, nb in enumerate(neighbors):
        N = Z[nb] - Z[i]
        G = N @ N.T
        ridge = 1e-3 * np.trace(G) / k if (k > 3 or np.linalg.cond(G) > 1e12) else 0.0
        np.testing.assert_allclose(W[i, nb], lle_weights_lagrange(Z, i, nb, ridge), atol=1e-8, rtol=0)


def test_lle_embedding_normalization():
    X, _ = generate("scurve", 300, seed=1)
    res = lle(X, 2, 10)
    np.testing.assert_allclose(np.linalg.norm(res.embedding, axis=0), np.sqrt(300), rtol=1e-10)
    assert np.max(np.abs(res.embedding.mean(axis=0))) <= 1e-4


# --- laplacian eigenmaps -----------------------------------------------------


def test_lapeig_trivial_pair_and_positive_eigenvalues():
    X, _ = generate("swissroll", 250, seed=4)
    res = laplacian_eigenmaps(X, 2, 10)
    assert abs(res.info["trivial_eigenvalue"]) <= 1e-10
    lam = res.info["eigenvalues"]
    assert lam[0] > 0 and lam[1] >= lam[0]


def test_lapeig_null_vector_is_constant():
    from dimkit._linalg import gen_sym_eig
    from dimkit.errors import DisconnectedGraph as E

    X, _ = generate("sphere", 120, seed=2)
    W = heat_weights(knn_graph(X, 8))
    D = np.diag(W.sum(axis=1))
    lam, F, _ = gen_sym_eig(D - W, D, E)
    f = F[:, 0]
    assert lam[0] <= 1e-10
    assert np.max(np.abs(f - f.mean())) <= 1e-8 * np.max(np.abs(f))


def test_lapeig_cycle_gives_circle():
    a = 2 * np.pi * np.arange(24) / 24
    X = np.c_[np.cos(a), np.sin(a), np.zeros(24)]
    Y = laplacian_eigenmaps(X, 2, 2).embedding
    r = np.linalg.norm(Y - Y.mean(axis=0), axis=1)
    assert np.max(np.abs(r - r.mean())) <= 0.05 * r.mean()


# --- kernel pca --------------------------------------------------------------


def test_kpca_linear_kernel_equals_pca(rng):
    X = _random_data(rng, 40, 4)
    a = pca(X, 3).embedding
    b = kernel_pca(X, 3, "linear").embedding
    assert np.max(np.abs(a - _align(a, b))) <= 1e-6


def test_kpca_separates_rings(rng):
    n = 200
    ang = rng.uniform(0, 2 * np.pi, n)
    radius = np.where(np.arange(n) < n // 2, 1.0, 3.0)
    X = np.c_[radius * np.cos(ang), radius * np.sin(ang)]
    inner = np.arange(n) < n // 2
    Y = kernel_pca(X, 2, KernelSpec("gaussian", {"bandwidth": 1.0})).embedding
    best = 0.0
    for j in range(2):
        for t in Y[:, j]:
            side = Y[:, j] <= t
            best = max(best, np.mean(side == inner), np.mean(side != inner))
    assert best >= 0.95


def test_kpca_too_many_dims(rng):
    X = rng.standard_normal((6, 3))
    with pytest.raises(InsufficientPositiveEigenvalues):
        kernel_pca(X, 6, "gaussian")


# --- feature selection --------------------------------------------------------


def test_fisher_selects_label_feature(rng):
    y = np.repeat([0, 1, 2], 20)
    X = np.c_[y.astype(float), rng.standard_normal(60)]
    res = fisher_score(X, y, 1)
    assert res.selected_features.tolist() == [0]
    assert np.isinf(res.info["scores"][0])


def test_fisher_p_minus_one(rng):
    X = rng.standard_normal((30, 6))
    y = rng.integers(0, 2, 30)
    res = fisher_score(X, y, 5)
    sel = res.selected_features
    assert len(set(sel.tolist())) == 5 and sel.min() >= 0 and sel.max() < 6
    np.testing.assert_array_equal(res.projection, selector_matrix(sel, 6))


def test_fisher_ranking_matches_loop_oracle(rng):
    X = rng.standard_normal((50, 7)) + np.outer(rng.integers(0, 3, 50), rng.uniform(0, 1, 7))
    y = rng.integers(0, 3, 50)
    res = fisher_score(X, y, 6)
    oracle = fisher_scores_loop(res.preprocess.transform(X), y)
    np.testing.assert_allclose(res.info["scores"], oracle, rtol=1e-10)
    assert res.selected_features.tolist() == np.argsort(-oracle, kind="stable")[:6].tolist()


def test_fisher_constant_feature(rng):
    X = np.c_[rng.standard_normal(20), np.full(20, 3.0)]
    with pytest.raises(DegenerateVariance):
        fisher_score(X, np.repeat([0, 1], 10), 1)


def test_laplacian_score_prefers_smooth_feature(rng):
    t = np.sort(rng.uniform(0, 1, 80))
    X = np.c_[t, rng.standard_normal(80)]
    # graph built on the manifold coordinate only through a scaled copy
    res = laplacian_score(np.c_[X, 20 * t], 1, 5)
    assert res.selected_features[0] in (0, 2)
    res2 = laplacian_score(np.c_[rng.standard_normal(80) * 0.01, t], 1, 5)
    assert res2.selected_features.tolist() == [1]


def test_laplacian_score_matches_dense_oracle(rng):
    X = rng.standard_normal((40, 4))
    res = laplacian_score(X, 2, 5)
    Z = res.preprocess.transform(X)
    W = heat_weights(knn_graph(Z, 5))
    D = np.diag(W.sum(axis=1))
    L = D - W
    one = np.ones(40)
    expected = []
    for r in range(4):
        f = Z[:, r]
        ft = f - (f @ D @ one) / (one @ D @ one) * one
        expected.append((ft @ L @ ft) / (ft @ D @ ft))
    np.testing.assert_allclose(res.info["scores"], expected, rtol=1e-10)
    assert res.selected_features.tolist() == np.argsort(expected, kind="stable")[:2].tolist()


def test_laplacian_score_constant_feature(rng):
    X = np.c_[rng.standard_normal(20), np.ones(20)]
    with pytest.raises(ZeroWeightedVariance):
        laplacian_score(X, 1, 3)


# --- registry and contracts ----------------------------------------------------


def test_config_validation(rng):
    with pytest.raises(InvalidParameter):
        ReducerConfig("lda", 1)
    with pytest.raises(InvalidParameter):
        ReducerConfig("pca", 1, labels=np.zeros(3))
    with pytest.raises(InvalidParameter):
        ReducerConfig("isomap", 1)
    with pytest.raises(InvalidParameter):
        ReducerConfig("tsne", 1)


def test_reduce_dispatch_equals_direct_call(rng):
    X = _random_data(rng, 30, 4)
    a = reduce(X, ReducerConfig("lpp", 2, neighborhood=Neighborhood(k=5)))
    b = lpp(X, 2, Neighborhood(k=5))
    assert np.array_equal(a.embedding, b.embedding)


def test_method_ids_lowercase_ascii():
    for mid in METHODS:
        assert mid.isascii() and mid == mid.lower() and mid.isalnum()


@pytest.mark.parametrize("method", ["pca", "pcasvd", "fscore"])
def test_permutation_equivariance_exact(method, rng):
    X = _random_data(rng, 40, 5)
    y = rng.integers(0, 2, 40)
    perm = rng.permutation(40)
    cfg = dict(labels=y) if method == "fscore" else {}
    a = reduce(X, ReducerConfig(method, 2, **cfg)).embedding
    cfg = dict(labels=y[perm]) if method == "fscore" else {}
    b = reduce(X[perm], ReducerConfig(method, 2, **cfg)).embedding
    np.testing.assert_allclose(b, a[perm], atol=1e-12)


@pytest.mark.parametrize("method", ["isomap", "lapeig", "lle", "lpp"])
def test_permutation_equivariance_graph_methods(method):
    X, _ = generate("swissroll", 150, seed=6)
    perm = np.random.default_rng(1).permutation(150)
    nb = Neighborhood(k=10)
    a = reduce(X, ReducerConfig(method, 2, neighborhood=nb)).embedding
    b = reduce(X[perm], ReducerConfig(method, 2, neighborhood=nb)).embedding
    assert np.max(np.abs(b - _align(b, a[perm]))) <= 1e-8
