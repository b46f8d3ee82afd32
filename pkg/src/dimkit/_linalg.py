"""Dense symmetric eigensolvers with a deterministic sign convention."""

import numpy as np
from scipy import linalg


def fix_signs(V):
    """Flip each column so its largest-magnitude entry is positive.

    Ties go to the lowest row index.
    """
    V = np.array(V, dtype=float, copy=True)
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _order(w, descending):
    return np.argsort(-w if descending else w, kind="stable")


def sym_eig(A, descending=True):
    """Eigenpairs of a symmetric matrix, sorted, with fixed signs."""
    A = np.asarray(A, dtype=float)
    w, V = linalg.eigh((A + A.T) / 2)
    order = _order(w, descending)
    return w[order], fix_signs(V[:, order])


def cholesky_with_ridge(B, error):
    """Lower Cholesky factor of ``B``, retrying once with a small ridge.

    The ridge is ``1e-10 * trace(B) / n``. ``error`` is raised if the
    regularized matrix still is not positive definite.
    """
    B = np.asarray(B, dtype=float)
    B = (B + B.T) / 2
    try:
        return linalg.cholesky(B, lower=True), 0.0
    except linalg.LinAlgError:
        pass
    n = B.shape[0]
    ridge = 1e-10 * np.trace(B) / n
    if not ridge > 0:
        raise error("right-hand matrix is not positive definite and has no positive trace")
    try:
        return linalg.cholesky(B + ridge * np.eye(n), lower=True), ridge
    except linalg.LinAlgError:
        raise error("right-hand matrix is not positive definite even after regularization") from None


def gen_sym_eig(A, B, error, descending=False):
    """Solve ``A v = lam B v`` for symmetric ``A`` and SPD ``B``.

    Reduces to a standard problem through the Cholesky factor ``B = L L^T``.
    Eigenvectors come back B-normalized (``v^T B v = 1``).
    """
    A = np.asarray(A, dtype=float)
    L, ridge = cholesky_with_ridge(B, error)
    C = linalg.solve_triangular(L, A, lower=True)
    C = linalg.solve_triangular(L, C.T, lower=True)
    w, U = linalg.eigh((C + C.T) / 2)
    V = linalg.solve_triangular(L.T, U, lower=False)
    order = _order(w, descending)
    return w[order], fix_signs(V[:, order]), ridge
