"""Facet enumeration: irredundant half-space form of a point cloud's
convex hull.

Facets are stored as unit normals g and offsets h with g.x <= h. The
enumeration delegates to Qhull (scipy.spatial.ConvexHull); because
Qhull triangulates its output, coplanar sub-facets are merged back
into single facets here. Coordinates coming from continuous data are
generically non-degenerate, so tolerance-based merging (rather than
symbolic perturbation) is used, with eps_hull = 1e-9 times the point
cloud diameter.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateInput, DimMismatch, TooFewPoints
from .numerics import as_matrix

__all__ = ["HPolytope", "enumerate_facets", "contains",
           "dump_facets", "load_facets"]


@dataclass(frozen=True)
class HPolytope:
    """Bounded full-dimensional polytope {x : G x <= h}, unit rows in G."""

    dim: int
    normals: np.ndarray              # K x dim, unit rows
    offsets: np.ndarray              # K
    interior: np.ndarray | None = field(default=None)  # strictly feasible point
    eps_hull: float = 0.0            # tolerance used during enumeration

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    def slacks(self, p: np.ndarray) -> np.ndarray:
        """h - G p for a single point p."""
        return self.offsets - self.normals @ np.asarray(p, dtype=float)


def enumerate_facets(points) -> HPolytope:
    """Irredundant H-representation of conv(points).

    points: (L, d) array, rows are points; they must affinely span R^d.
    """
    pts = as_matrix(points, "points")
    l, d = pts.shape
    if d < 1:
        raise DegenerateInput("dimension must be >= 1")
    if l < d + 1:
        raise TooFewPoints(f"need at least d+1={d + 1} points, got {l}")

    span = pts.max(axis=0) - pts.min(axis=0)
    diam = float(np.linalg.norm(span))
    if diam <= 0.0:
        raise DegenerateInput("all points coincide")
    eps = 1e-9 * diam

    if d == 1:
        flat = pts.ravel()
        normals = np.array([[1.0], [-1.0]])
        offsets = np.array([flat.max(), -flat.min()])
        interior = np.array([0.5 * (flat.max() + flat.min())])
        return HPolytope(1, normals, offsets, interior, eps)

    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[d - 1] < 1e-12 * max(sv[0], diam):
        raise DegenerateInput(
            f"points do not affinely span R^{d} (singular values {sv[:d]})")

    try:
        qh = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateInput(f"hull construction failed: {exc}") from exc

    normals = qh.equations[:, :d].copy()
    offsets = -qh.equations[:, d].copy()
    scale = np.linalg.norm(normals, axis=1)
    normals /= scale[:, None]
    offsets /= scale

    normals, offsets = _merge_duplicates(normals, offsets, eps)
    interior = pts[qh.vertices].mean(axis=0)
    return HPolytope(d, normals, offsets, interior, eps)


def _merge_duplicates(normals: np.ndarray, offsets: np.ndarray,
                      eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Drop facets whose normal is within 1e-7 rad and offset within eps
    of an earlier one (Qhull's triangulated output repeats merged facets)."""
    keep: list[int] = []
    for i in range(normals.shape[0]):
        dup = False
        for j in keep:
            if abs(offsets[i] - offsets[j]) >= eps:
                continue
            cos = float(np.dot(normals[i], normals[j]))
            if cos >= 1.0 - 5e-15:  # angle < ~1e-7 rad
                dup = True
                break
        if not dup:
            keep.append(i)
    idx = np.array(keep, dtype=int)
    return normals[idx], offsets[idx]


def contains(poly: HPolytope, p, slack: float) -> bool:
    """True iff g_i . p <= h_i + slack for every facet."""
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] != poly.dim:
        raise DimMismatch(f"point has dim {p.shape[0]}, polytope {poly.dim}")
    return bool(np.all(poly.normals @ p <= poly.offsets + slack))


def dump_facets(poly: HPolytope, path) -> None:
    """Write facets as CSV rows ``g_1,...,g_d,h``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for g, h in zip(poly.normals, poly.offsets):
            writer.writerow([format(v, ".17g") for v in g] +
                            [format(h, ".17g")])


def load_facets(path) -> HPolytope:
    """Read a facet CSV produced by dump_facets (or an external tool).

    Normals are re-normalized to unit length; no interior point is
    attached (the solver derives one when needed).
    """
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row:
                rows.append([float(v) for v in row])
    if not rows:
        raise DegenerateInput(f"no facets in {path}")
    arr = np.asarray(rows, dtype=float)
    d = arr.shape[1] - 1
    normals = arr[:, :d]
    offsets = arr[:, d]
    scale = np.linalg.norm(normals, axis=1)
    if (scale <= 0).any():
        raise DegenerateInput("zero normal in facet file")
    return HPolytope(d, normals / scale[:, None], offsets / scale, None, 0.0)
