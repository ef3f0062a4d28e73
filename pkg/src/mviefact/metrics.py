"""Evaluation metrics: permutation-aligned RMS angle error and SNR."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDims, DimMismatch, ZeroColumn
from .numerics import as_matrix

__all__ = ["TrialResult", "rms_angle_error", "snr_of"]

_MAX_EXHAUSTIVE = 8


@dataclass
class TrialResult:
    """One bench trial: parameters, error, and per-stage runtimes."""

    seed: int
    N: int
    M: int
    L: int
    r: float
    snr_db: float
    status: str = "ok"
    rms_angle_deg: float = math.nan
    permutation: tuple[int, ...] = ()
    K_facets: int = 0
    runtimes_sec: dict[str, float] = field(default_factory=dict)


def rms_angle_error(a, a_hat) -> tuple[float, tuple[int, ...]]:
    """Permutation-minimized RMS of the column angles, in degrees.

    phi = min over permutations pi of
          sqrt( (1/N) sum_i arccos^2( <a_i, ahat_{pi(i)}> / norms ) ).

    The search is exhaustive (N <= 8, at most 40320 permutations).
    Returns (phi_deg, permutation), where permutation[i] is the column
    of a_hat matched to column i of a.
    """
    a = as_matrix(a, "A")
    b = as_matrix(a_hat, "A_hat")
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    n = a.shape[1]
    if n > _MAX_EXHAUSTIVE:
        raise BadDims(f"exhaustive alignment supports N <= {_MAX_EXHAUSTIVE}")
    na = np.linalg.norm(a, axis=0)
    nb = np.linalg.norm(b, axis=0)
    if na.min() <= 0.0 or nb.min() <= 0.0:
        raise ZeroColumn("angle error undefined for zero columns")
    cos = np.clip((a / na).T @ (b / nb), -1.0, 1.0)
    ang2 = np.arccos(cos) ** 2  # ang2[i, j]: angle^2 between a_i, ahat_j

    best = math.inf
    best_perm: tuple[int, ...] = tuple(range(n))
    rows = np.arange(n)
    for perm in itertools.permutations(range(n)):
        val = ang2[rows, perm].sum()
        if val < best:
            best = val
            best_perm = perm
    return math.degrees(math.sqrt(best / n)), best_perm


def snr_of(x_clean, w_noise) -> float:
    """Realized signal-to-noise ratio in dB: ||X||^2 / ||W||^2.

    Matches the generator's definition with the empirical noise second
    moment in place of the nominal variance. Returns +inf for zero noise.
    """
    x = as_matrix(x_clean, "X_clean")
    w = as_matrix(w_noise, "W_noise")
    if x.shape != w.shape:
        raise DimMismatch(f"shape mismatch: {x.shape} vs {w.shape}")
    noise = float(np.sum(w * w))
    if noise == 0.0:
        return math.inf
    signal = float(np.sum(x * x))
    return 10.0 * math.log10(signal / noise)
