"""Dense linear-algebra and small-ML kernel.

Matrices throughout the package are plain float64 ``numpy.ndarray``
objects in row-major layout; every public operation validates shape and
finiteness on entry. This module provides the shared primitives: a
symmetric eigendecomposition, a thin SVD, Euclidean projection onto the
unit simplex, and a seeded k-means.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    BadRank,
    ConvergenceFailure,
    NonSquare,
    NotFinite,
    TooFewPoints,
)

__all__ = [
    "EigSymResult",
    "as_matrix",
    "as_vector",
    "eig_sym",
    "svd_thin",
    "project_simplex",
    "project_simplex_columns",
    "kmeans",
    "rng_from_seed",
]


def rng_from_seed(seed: int) -> np.random.Generator:
    """Package-wide RNG: Philox (counter-based, 64-bit), portable streams."""
    return np.random.Generator(np.random.Philox(seed))


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array and reject non-finite entries."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise BadRank(f"{name} must be 2-D, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise NotFinite(f"{name} contains NaN or Inf")
    return a


def as_vector(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise NotFinite(f"{name} contains NaN or Inf")
    return v


class EigSymResult(NamedTuple):
    eigenvalues: np.ndarray   # sorted descending
    eigenvectors: np.ndarray  # orthogonal, column i pairs with eigenvalue i


def eig_sym(a) -> EigSymResult:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized as (A + A^T)/2 before factorization;
    asymmetry beyond 1e-8 * max(1, ||A||) is rejected.
    """
    a = as_matrix(a, "eig_sym input")
    n, m = a.shape
    if n != m:
        raise NonSquare(f"eig_sym needs a square matrix, got {n}x{m}")
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.linalg.norm(a - a.T) > 1e-8 * scale:
        raise NonSquare("matrix is not symmetric within tolerance")
    sym = 0.5 * (a + a.T)
    try:
        w, u = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(f"symmetric eigensolver failed: {exc}") from exc
    order = np.argsort(w)[::-1]
    return EigSymResult(w[order], u[:, order])


def svd_thin(a, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD: top-k left/right singular vectors and singular values.

    Returns (U, s, V) with U m-by-k, s descending, V n-by-k such that
    A V = U diag(s).
    """
    a = as_matrix(a, "svd_thin input")
    m, n = a.shape
    if not (1 <= k <= min(m, n)):
        raise BadRank(f"k={k} out of range for a {m}x{n} matrix")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return u[:, :k], s[:k], vt[:k].T


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of a vector onto the unit simplex.

    Sort-based finite-step algorithm: exact in exact arithmetic.
    """
    v = as_vector(v, "project_simplex input")
    return _simplex_core(v[None, :])[0]


def project_simplex_columns(v) -> np.ndarray:
    """Project every column of a matrix onto the unit simplex."""
    v = as_matrix(v, "project_simplex_columns input")
    return _simplex_core(v.T).T


def _simplex_core(rows: np.ndarray) -> np.ndarray:
    # rows: (m, n), each row projected independently.
    n = rows.shape[1]
    u = np.sort(rows, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1) - 1.0
    j = np.arange(1, n + 1)
    cond = u * j > css
    rho = n - np.argmax(cond[:, ::-1], axis=1) - 1  # last True index
    theta = css[np.arange(rows.shape[0]), rho] / (rho + 1)
    return np.maximum(rows - theta[:, None], 0.0)


def kmeans(points, k: int, seed: int, max_iter: int = 100,
           tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's k-means with k-means++ seeding, deterministic given seed.

    Empty clusters are reseeded from the point farthest from its
    assigned centroid. The within-cluster sum of squares is checked to
    be non-increasing at every iteration.

    Returns (centroids (k, d), labels (n,)).
    """
    pts = as_matrix(points, "kmeans points")
    n = pts.shape[0]
    if k < 1 or n < k:
        raise TooFewPoints(f"kmeans needs at least k={k} points, got {n}")
    rng = rng_from_seed(seed)
    centroids = _kmeanspp_init(pts, k, rng)

    prev_obj = np.inf
    labels = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        d2 = _sqdist(pts, centroids)
        labels = np.argmin(d2, axis=1)
        obj = float(d2[np.arange(n), labels].sum())
        if obj > prev_obj * (1.0 + 1e-12) + 1e-15:
            raise ConvergenceFailure("k-means objective increased")
        for j in range(k):
            mask = labels == j
            if mask.any():
                centroids[j] = pts[mask].mean(axis=0)
            else:
                far = int(np.argmax(d2[np.arange(n), labels]))
                centroids[j] = pts[far]
                labels[far] = j
        if prev_obj - obj <= tol * max(1.0, abs(obj)):
            prev_obj = obj
            break
        prev_obj = obj

    d2 = _sqdist(pts, centroids)
    labels = np.argmin(d2, axis=1)
    return centroids, labels


def _kmeanspp_init(pts: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = pts.shape[0]
    centroids = np.empty((k, pts.shape[1]))
    centroids[0] = pts[rng.integers(n)]
    d2 = _sqdist(pts, centroids[:1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining points coincide with chosen centroids
            centroids[j] = pts[rng.integers(n)]
            continue
        probs = d2 / total
        centroids[j] = pts[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, _sqdist(pts, centroids[j:j + 1]).ravel())
    return centroids


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (n, d), (k, d) -> (n, k) squared distances; clipped against fp noise
    diff = a[:, None, :] - b[None, :, :]
    return np.maximum(np.einsum("nkd,nkd->nk", diff, diff), 0.0)
