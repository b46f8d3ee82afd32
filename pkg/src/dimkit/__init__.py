"""Dimension reduction and intrinsic dimension estimation."""

__version__ = "0.1.0"

from .core import IdeResult, PreprocessRecord, ReductionResult, apply_to_new, validate
from .estimate import est_corrdim, est_mle, est_pcadim, est_twonn
from .generate import generate
from .graph import connected_components, eps_graph, floyd_warshall, knn_graph
from .kernels import KernelSpec, center_kernel, kernel_matrix
from .preprocess import preprocess
from .reduce import (
    METHODS,
    Neighborhood,
    ReducerConfig,
    classical_mds,
    fisher_score,
    isomap,
    kernel_pca,
    laplacian_eigenmaps,
    laplacian_score,
    lda,
    lle,
    lpp,
    pca,
    pca_svd,
    reduce,
)
