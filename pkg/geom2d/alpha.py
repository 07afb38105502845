from __future__ import annotations

import logging

import numpy as np
import shapely
from scipy.spatial import Delaunay, QhullError
from shapely.geometry import Polygon

from errors import DegenerateInputError, FragmentationError
from .contract import polygon_parts

logger = logging.getLogger(__name__)


def _unique_2d(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise DegenerateInputError("alpha shape needs an (n, 2) point array")
    return np.unique(pts[:, :2], axis=0)


def is_collinear(pts: np.ndarray) -> bool:
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    return len(s) < 2 or s[1] <= 1e-12 * max(float(s[0]), 1.0)


def alphashape(points, alpha: float, *, strict: bool = True) -> list[Polygon]:
    """
    Rolling-ball boundary with ball radius 1/alpha.

    Keeps the Delaunay triangles whose circumradius is below 1/alpha and merges them.
    Returns the resulting polygons, largest first. With `strict`, every input point has to
    end up covered, otherwise FragmentationError (with the largest polygon attached).
    """
    if alpha <= 0:
        raise DegenerateInputError(f"alpha must be > 0, got {alpha}")
    pts = _unique_2d(points)
    if len(pts) < 3 or is_collinear(pts):
        raise DegenerateInputError(f"alpha shape needs >= 3 non-collinear points (got {len(pts)} distinct)")

    try:
        tri = Delaunay(pts)
    except QhullError as exc:
        raise DegenerateInputError(f"Delaunay failed: {exc}") from None
    simplices = tri.simplices
    a, b, c = (pts[simplices[:, k]] for k in range(3))
    la = np.linalg.norm(b - c, axis=1)
    lb = np.linalg.norm(c - a, axis=1)
    lc = np.linalg.norm(a - b, axis=1)
    ab, ac = b - a, c - a
    area = 0.5 * np.abs(ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])
    with np.errstate(divide="ignore", invalid="ignore"):
        circum = la * lb * lc / (4.0 * area)
    keep = (area > 0) & (circum < 1.0 / alpha)

    if not keep.any():
        raise FragmentationError(f"alpha={alpha} leaves no triangle; points are too sparse", largest=None)

    kept = simplices[keep]
    triangles = shapely.polygons(pts[kept])
    merged = shapely.coverage_union_all(triangles)
    parts = sorted(polygon_parts(merged), key=lambda p: (-p.area, p.bounds))

    if strict:
        covered = np.zeros(len(pts), dtype=bool)
        covered[kept.ravel()] = True
        if not covered.all():
            raise FragmentationError(
                f"alpha={alpha} leaves {int((~covered).sum())} of {len(pts)} points outside the shape",
                largest=parts[0] if parts else None,
            )
    logger.debug("alpha=%.3g: %d points -> %d polygon(s)", alpha, len(pts), len(parts))
    return parts
