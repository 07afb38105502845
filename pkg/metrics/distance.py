"""
Exact unsigned point-to-mesh distance.

Triangles are bucketed by bounding radius (powers of two) with one KD-tree over the
centroids per bucket. A query first takes the distance to the nearest-centroid triangle of
each bucket as an upper bound d, then checks every triangle whose centroid lies within
d + (bucket's largest radius). A triangle outside that ball cannot be closer than d, so the
result equals the exhaustive minimum.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from errors import EmptyResultError

_BATCH = 4096


def closest_points_on_triangles(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Row-wise closest point on triangle (a, b, c) to p, all (k, 3); Voronoi-region tests."""
    ab, ac, ap = b - a, c - a, p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        out = a + ab * (vb / denom)[:, None] + ac * (vc / denom)[:, None]
        # later assignments win, so regions go from lowest to highest precedence
        m = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        out[m] = (b + (c - b) * w[:, None])[m]
        m = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
        w = d2 / (d2 - d6)
        out[m] = (a + ac * w[:, None])[m]
        m = (d6 >= 0) & (d5 <= d6)
        out[m] = c[m]
        m = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
        v = d1 / (d1 - d3)
        out[m] = (a + ab * v[:, None])[m]
        m = (d3 >= 0) & (d4 <= d3)
        out[m] = b[m]
        m = (d1 <= 0) & (d2 <= 0)
        out[m] = a[m]

    bad = ~np.isfinite(out).all(axis=1)
    if bad.any():                                   # zero-area triangles: nearest of the three edges
        out[bad] = _closest_on_edges(p[bad], a[bad], b[bad], c[bad])
    return out


def _closest_on_segment(p, a, b):
    ab = b - a
    len2 = np.einsum("ij,ij->i", ab, ab)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / len2, 0.0, 1.0)
    t = np.where(len2 > 0, t, 0.0)
    return a + ab * t[:, None]


def _closest_on_edges(p, a, b, c):
    cands = np.stack([_closest_on_segment(p, a, b), _closest_on_segment(p, b, c), _closest_on_segment(p, c, a)])
    d = np.linalg.norm(cands - p[None], axis=2)
    return cands[np.argmin(d, axis=0), np.arange(len(p))]


def point_triangle_distance(p: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Distances of points (k, 3) to triangles (k, 3, 3), row-wise."""
    q = closest_points_on_triangles(p, tri[:, 0], tri[:, 1], tri[:, 2])
    return np.linalg.norm(q - p, axis=1)


class TriangleIndex:
    """Read-only exact nearest-triangle distance structure."""

    def __init__(self, triangles: np.ndarray):
        tri = np.asarray(triangles, dtype=np.float64).reshape(-1, 3, 3)
        if len(tri) == 0:
            raise EmptyResultError("distance query against a mesh without faces")
        self.triangles = tri
        centroids = tri.mean(axis=1)
        radius = np.linalg.norm(tri - centroids[:, None, :], axis=2).max(axis=1)
        level = np.floor(np.log2(np.maximum(radius, 1e-12))).astype(np.int64)
        self.buckets = []
        for lv in np.unique(level):
            ids = np.flatnonzero(level == lv)
            self.buckets.append((ids, cKDTree(centroids[ids]), float(radius[ids].max())))

    @classmethod
    def from_meshes(cls, meshes) -> "TriangleIndex":
        return cls(np.concatenate([m.triangles() for m in meshes]) if meshes else np.zeros((0, 3, 3)))

    def _query_batch(self, pts: np.ndarray) -> np.ndarray:
        n = len(pts)
        upper = np.full(n, np.inf)
        for ids, tree, _ in self.buckets:
            _, nn = tree.query(pts)
            upper = np.minimum(upper, point_triangle_distance(pts, self.triangles[ids[nn]]))
        best = upper.copy()
        for ids, tree, rmax in self.buckets:
            hits = tree.query_ball_point(pts, upper + rmax)
            counts = np.fromiter((len(h) for h in hits), dtype=np.int64, count=n)
            if counts.sum() == 0:
                continue
            rows = np.repeat(np.arange(n), counts)
            cols = ids[np.concatenate([np.asarray(h, dtype=np.int64) for h in hits if len(h)])]
            d = point_triangle_distance(pts[rows], self.triangles[cols])
            np.minimum.at(best, rows, d)
        return best

    def query(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        out = np.empty(len(pts))
        for s in range(0, len(pts), _BATCH):
            out[s:s + _BATCH] = self._query_batch(pts[s:s + _BATCH])
        return out


def unsigned_distance(point, mesh) -> float:
    """Distance from one point to the nearest face of `mesh` (or a list of meshes)."""
    meshes = mesh if isinstance(mesh, (list, tuple)) else [mesh]
    return float(TriangleIndex.from_meshes(meshes).query(np.asarray(point, dtype=np.float64)[None])[0])


def brute_force_distance(points, triangles) -> np.ndarray:
    """Exhaustive minimum over all triangles; O(n * m)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    tri = np.asarray(triangles, dtype=np.float64).reshape(-1, 3, 3)
    out = np.empty(len(pts))
    for i, p in enumerate(pts):
        out[i] = point_triangle_distance(np.broadcast_to(p, (len(tri), 3)).copy(), tri).min()
    return out
