"""Affine set fitting and the coordinate maps between ambient and
reduced space.

For data spanning an (N-1)-dimensional affine set, the chart (Phi, b)
with semi-orthonormal Phi maps reduced coordinates u to Phi u + b, and
Phi^T (x - b) inverts it on the affine hull. Volumes are preserved
because det(Phi^T Phi) = 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BadDims, DimMismatch, RankDeficientData
from .numerics import as_matrix, as_vector, svd_thin

__all__ = [
    "AffineChart",
    "affine_fit",
    "reduce_points",
    "lift_point",
    "lift_points",
    "fit_residual",
]


@dataclass(frozen=True)
class AffineChart:
    Phi: np.ndarray  # M x (N-1), Phi^T Phi = I
    b: np.ndarray    # M


def affine_fit(x: np.ndarray, n: int) -> AffineChart:
    """Fit the (N-1)-dimensional affine hull of the data columns.

    b is the column mean and Phi holds the top N-1 left singular
    vectors of the centered data. Raises RankDeficientData when the
    centered data does not carry N-1 directions (relative singular
    value below 1e-10).
    """
    x = as_matrix(x, "data")
    m, l = x.shape
    if l < n:
        raise BadDims(f"need L >= N, got L={l}, N={n}")
    if m < n - 1:
        raise BadDims(f"need M >= N-1, got M={m}, N={n}")
    if n < 2:
        raise BadDims("need N >= 2 for a nontrivial affine fit")
    b = x.mean(axis=1)
    centered = x - b[:, None]
    u, s, _ = svd_thin(centered, n - 1)
    if s[0] <= 0.0 or s[-1] < 1e-10 * s[0]:
        raise RankDeficientData(
            f"centered data is rank deficient: singular values {s}")
    chart = AffineChart(Phi=u, b=b)
    res = fit_residual(chart, x)
    scale = float(np.linalg.norm(centered, axis=0).max())
    if res > 1e-8 * max(scale, 1e-300):
        warnings.warn(
            f"affine fit residual {res:.3e} exceeds 1e-8 relative; "
            "data is inconsistent with the noiseless model",
            stacklevel=2)
    return chart


def fit_residual(chart: AffineChart, x: np.ndarray) -> float:
    """Largest distance of any column from the chart's affine set."""
    x = as_matrix(x, "data")
    centered = x - chart.b[:, None]
    off = centered - chart.Phi @ (chart.Phi.T @ centered)
    return float(np.linalg.norm(off, axis=0).max())


def reduce_points(x: np.ndarray, chart: AffineChart) -> np.ndarray:
    """Map data columns into reduced coordinates: Phi^T (x - b)."""
    x = as_matrix(x, "data")
    if x.shape[0] != chart.Phi.shape[0]:
        raise DimMismatch(
            f"data has {x.shape[0]} rows, chart expects {chart.Phi.shape[0]}")
    return chart.Phi.T @ (x - chart.b[:, None])


def lift_point(q: np.ndarray, chart: AffineChart) -> np.ndarray:
    """Map one reduced point back to ambient space: Phi q + b."""
    q = as_vector(q, "reduced point")
    if q.shape[0] != chart.Phi.shape[1]:
        raise DimMismatch(
            f"point has dim {q.shape[0]}, chart expects {chart.Phi.shape[1]}")
    return chart.Phi @ q + chart.b


def lift_points(q: np.ndarray, chart: AffineChart) -> np.ndarray:
    """Columnwise lift of reduced points."""
    q = as_matrix(q, "reduced points")
    if q.shape[0] != chart.Phi.shape[1]:
        raise DimMismatch(
            f"points have dim {q.shape[0]}, chart expects {chart.Phi.shape[1]}")
    return chart.Phi @ q + chart.b[:, None]
