"""Synthetic samples from parametric data models.

All randomness comes from one ``numpy.random.Generator`` backed by PCG64,
seeded with the caller's seed, and draws happen in a fixed order, so the
same ``(model, n, noise, seed)`` always gives bit-identical output.

Models (ambient space, intrinsic dimension):

==========  ======  =========  ==============================================
swissroll   R^3     2          (t cos t, h, t sin t)
scurve      R^3     2          (sin t, h, sign(t)(cos t - 1))
helix       R^3     1          (cos t, sin t, 0.2 t)
twinpeaks   R^3     2          (u, v, sin(pi u) tanh(3 v))
mobius      R^3     2          Moebius strip of half-width 0.4
sphere      R^3     2          uniform on the unit sphere
saddle      R^3     2          (u, v, u^2 - v^2)
ribbon      R^3     2          half-cylinder (cos t, sin t, h)
gaussmix    R^p     p          three unit-variance Gaussians
lowrank     R^72    12         standard normal in a fixed 12-dim subspace
==========  ======  =========  ==============================================
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadSampleCount, InvalidParameter, UnknownModel

MODELS = (
    "swissroll",
    "scurve",
    "helix",
    "twinpeaks",
    "mobius",
    "sphere",
    "saddle",
    "ribbon",
    "gaussmix",
    "lowrank",
)

# fixed seed for the lowrank basis, independent of the sample seed
LOWRANK_BASIS_SEED = 20200417


@dataclass(frozen=True)
class GroundTruth:
    model: str
    intrinsic_dim: int
    latent: np.ndarray


def rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def lowrank_basis(intrinsic=12, ambient=72) -> np.ndarray:
    """A fixed ``(intrinsic, ambient)`` matrix with orthonormal rows."""
    g = rng(LOWRANK_BASIS_SEED)
    Q, R = np.linalg.qr(g.standard_normal((ambient, intrinsic)))
    Q = Q * np.sign(np.diag(R))
    return Q.T.copy()


def _swissroll(g, n):
    t = g.uniform(1.5 * np.pi, 4.5 * np.pi, n)
    h = g.uniform(0.0, 21.0, n)
    return np.column_stack([t * np.cos(t), h, t * np.sin(t)]), np.column_stack([t, h])


def _scurve(g, n):
    t = g.uniform(-1.5 * np.pi, 1.5 * np.pi, n)
    h = g.uniform(0.0, 2.0, n)
    return np.column_stack([np.sin(t), h, np.sign(t) * (np.cos(t) - 1)]), np.column_stack([t, h])


def _helix(g, n):
    t = g.uniform(0.0, 6 * np.pi, n)
    return np.column_stack([np.cos(t), np.sin(t), 0.2 * t]), t[:, None]


def _twinpeaks(g, n):
    uv = g.uniform(-1.0, 1.0, (n, 2))
    u, v = uv.T
    return np.column_stack([u, v, np.sin(np.pi * u) * np.tanh(3 * v)]), uv


def _mobius(g, n):
    theta = g.uniform(0.0, 2 * np.pi, n)
    w = g.uniform(-0.4, 0.4, n)
    r = 1 + w * np.cos(theta / 2)
    X = np.column_stack([r * np.cos(theta), r * np.sin(theta), w * np.sin(theta / 2)])
    return X, np.column_stack([theta, w])


def _sphere(g, n):
    Z = g.standard_normal((n, 3))
    norms = np.linalg.norm(Z, axis=1)
    # a zero draw has probability zero but would divide by zero
    while np.any(norms == 0):
        bad = norms == 0
        Z[bad] = g.standard_normal((bad.sum(), 3))
        norms = np.linalg.norm(Z, axis=1)
    X = Z / norms[:, None]
    latent = np.column_stack([np.arccos(np.clip(X[:, 2], -1, 1)), np.arctan2(X[:, 1], X[:, 0])])
    return X, latent


def _saddle(g, n):
    uv = g.uniform(-1.0, 1.0, (n, 2))
    u, v = uv.T
    return np.column_stack([u, v, u**2 - v**2]), uv


def _ribbon(g, n):
    t = g.uniform(0.0, np.pi, n)
    h = g.uniform(0.0, 2.0, n)
    return np.column_stack([np.cos(t), np.sin(t), h]), np.column_stack([t, h])


def _gaussmix(g, n, p=3):
    centers = 6.0 * np.arange(3)[:, None] * np.ones(p) / np.sqrt(p)
    comp = g.integers(0, 3, n)
    X = centers[comp] + g.standard_normal((n, p))
    return X, comp[:, None].astype(float)


def _lowrank(g, n, intrinsic=12, ambient=72):
    A = lowrank_basis(intrinsic, ambient)
    Z = g.standard_normal((n, intrinsic))
    return Z @ A, Z


_MAKERS = {
    "swissroll": (_swissroll, 2),
    "scurve": (_scurve, 2),
    "helix": (_helix, 1),
    "twinpeaks": (_twinpeaks, 2),
    "mobius": (_mobius, 2),
    "sphere": (_sphere, 2),
    "saddle": (_saddle, 2),
    "ribbon": (_ribbon, 2),
    "gaussmix": (_gaussmix, None),
    "lowrank": (_lowrank, None),
}


def generate(model: str, n: int, noise: float = 0.0, seed: int = 0, **params):
    """Draw ``n`` samples from ``model``; return ``(data, GroundTruth)``.

    Extra keyword parameters: ``p`` for gaussmix (default 3);
    ``intrinsic``/``ambient`` for lowrank (default 12/72). Isotropic Gaussian
    noise of standard deviation ``noise`` is added in ambient space after
    the clean sample is drawn.
    """
    if model not in _MAKERS:
        raise UnknownModel(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise BadSampleCount(f"need an integer sample count >= 2, got {n!r}")
    n = int(n)
    if not noise >= 0:
        raise InvalidParameter(f"noise must be nonnegative, got {noise!r}")
    if seed < 0:
        raise InvalidParameter(f"seed must be an unsigned integer, got {seed!r}")
    maker, dim = _MAKERS[model]
    if model == "gaussmix":
        p = int(params.pop("p", 3))
        if p < 1:
            raise InvalidParameter("gaussmix needs p >= 1")
        params["p"] = p
        dim = p
    elif model == "lowrank":
        params.setdefault("intrinsic", 12)
        params.setdefault("ambient", 72)
        if not 1 <= params["intrinsic"] <= params["ambient"]:
            raise InvalidParameter("lowrank needs 1 <= intrinsic <= ambient")
        dim = int(params["intrinsic"])
    elif params:
        raise InvalidParameter(f"model {model!r} takes no parameters, got {sorted(params)}")
    g = rng(seed)
    X, latent = maker(g, n, **params)
    if noise > 0:
        X = X + noise * g.standard_normal(X.shape)
    return X, GroundTruth(model, dim, latent)
